#pragma once

#include <string>
#include <vector>

#include "smoothflow/dynamics.hpp"

namespace smoothflow {

/// One curve in a plot. Points with nonpositive coordinates are dropped on
/// log axes.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f5fa8";
    bool dashed = false;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool logx = false;
    bool logy = false;
    /// When set, draws a dashed slope guide through the plot (log-log only),
    /// e.g. -2 for the t^-2 rate.
    bool slope_guide = false;
    double slope = -2.0;
    std::vector<PlotSeries> series;
    int width = 720;
    int height = 480;
};

/// Standalone SVG 1.1 document; deterministic bytes for fixed input.
std::string render_svg(const PlotSpec& spec);

/// Trajectory CSV with the fixed header
/// t,x_1..x_n,v_1..v_n,value_reg,value_raw,residual,energy_E,W,t2_abs_residual,t_speed
/// (one row per sample; velocities are written as 0 for first-order runs).
std::string trajectory_csv(const Trajectory& traj, const DiagnosticsSummary& diag);

void write_text_file(const std::string& path, const std::string& content);

/// Shortest round-trippable decimal form of v ('.' decimal point, C locale).
std::string format_number(double v);

}  // namespace smoothflow
