#include "smoothflow/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace smoothflow {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    // shortest representation that round-trips
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

std::string trajectory_csv(const Trajectory& traj, const DiagnosticsSummary& diag) {
    if (traj.samples.empty()) throw Error("trajectory_csv: empty trajectory");
    if (diag.records.size() != traj.samples.size())
        throw DimensionMismatch("trajectory_csv: diagnostics do not match trajectory");
    const int n = static_cast<int>(traj.samples.front().x.size());
    std::ostringstream os;
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x_" << i;
    for (int i = 1; i <= n; ++i) os << ",v_" << i;
    os << ",value_reg,value_raw,residual,energy_E,W,t2_abs_residual,t_speed\n";
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        const auto& s = traj.samples[k];
        const auto& r = diag.records[k];
        os << format_number(s.t);
        for (int i = 0; i < n; ++i) os << ',' << format_number(s.x[i]);
        for (int i = 0; i < n; ++i) os << ',' << format_number(s.v.size() ? s.v[i] : 0.0);
        os << ',' << format_number(r.value_reg) << ',' << format_number(r.value_raw) << ','
           << format_number(r.residual) << ',' << format_number(r.has_energy ? r.energy_E : 0.0)
           << ',' << format_number(r.W) << ',' << format_number(r.t2_abs_residual) << ','
           << format_number(r.t_speed) << '\n';
    }
    return os.str();
}

namespace {

struct Mapper {
    double lo, hi;     // data range (already log10 if log axis)
    double p0, p1;     // pixel range
    double at(double v) const {
        double u = (hi > lo) ? (v - lo) / (hi - lo) : 0.5;
        return p0 + u * (p1 - p0);
    }
};

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

// tick positions: decades on log axes, ~6 round values on linear axes
std::vector<double> ticks_for(double lo, double hi, bool log_axis) {
    std::vector<double> out;
    if (log_axis) {
        for (int e = static_cast<int>(std::ceil(lo - 1e-9)); e <= static_cast<int>(std::floor(hi + 1e-9)); ++e)
            out.push_back(e);
        if (out.empty()) out = {lo, hi};
        return out;
    }
    double span = hi - lo;
    if (span <= 0) return {lo};
    double raw = span / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(v);
    return out;
}

std::string tick_label(double v, bool log_axis) {
    if (log_axis) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "1e%d", static_cast<int>(std::lround(v)));
        return buf;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    if (spec.series.empty()) throw Error("render_svg: no series");
    const double W = spec.width, H = spec.height;
    const double ml = 70, mr = 20, mt = 36, mb = 50;

    auto tx = [&](double v) { return spec.logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.logy ? std::log10(v) : v; };
    auto usable = [&](double xv, double yv) {
        return std::isfinite(xv) && std::isfinite(yv) && (!spec.logx || xv > 0) &&
               (!spec.logy || yv > 0);
    };

    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool any = false;
    for (const auto& s : spec.series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            double xv = tx(s.x[i]), yv = ty(s.y[i]);
            if (!any) {
                xlo = xhi = xv;
                ylo = yhi = yv;
                any = true;
            } else {
                xlo = std::min(xlo, xv);
                xhi = std::max(xhi, xv);
                ylo = std::min(ylo, yv);
                yhi = std::max(yhi, yv);
            }
        }
    if (!any) throw Error("render_svg: no plottable points");
    double xpad = 0.04 * std::max(xhi - xlo, 1e-12), ypad = 0.06 * std::max(yhi - ylo, 1e-12);
    xlo -= xpad;
    xhi += xpad;
    ylo -= ypad;
    yhi += ypad;
    Mapper mx{xlo, xhi, ml, W - mr};
    Mapper my{ylo, yhi, H - mb, mt};

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width
       << "px\" height=\"" << spec.height << "px\" viewBox=\"0 0 " << spec.width << ' '
       << spec.height << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height
       << "\" fill=\"white\"/>\n";

    // grid + ticks
    for (double t : ticks_for(xlo + xpad, xhi - xpad, spec.logx)) {
        double px = mx.at(t);
        os << "<line x1=\"" << fmt_px(px) << "\" y1=\"" << fmt_px(mt) << "\" x2=\"" << fmt_px(px)
           << "\" y2=\"" << fmt_px(H - mb) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << fmt_px(px) << "\" y=\"" << fmt_px(H - mb + 18)
           << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"middle\">"
           << tick_label(t, spec.logx) << "</text>\n";
    }
    for (double t : ticks_for(ylo + ypad, yhi - ypad, spec.logy)) {
        double py = my.at(t);
        os << "<line x1=\"" << fmt_px(ml) << "\" y1=\"" << fmt_px(py) << "\" x2=\"" << fmt_px(W - mr)
           << "\" y2=\"" << fmt_px(py) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << fmt_px(ml - 6) << "\" y=\"" << fmt_px(py + 4)
           << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">"
           << tick_label(t, spec.logy) << "</text>\n";
    }
    // axes box
    os << "<rect x=\"" << fmt_px(ml) << "\" y=\"" << fmt_px(mt) << "\" width=\"" << fmt_px(W - ml - mr)
       << "\" height=\"" << fmt_px(H - mt - mb)
       << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // slope guide (log-log): line of the requested slope through the first
    // series' first plottable point
    if (spec.slope_guide && spec.logx && spec.logy) {
        for (const auto& s : spec.series) {
            std::size_t i = 0;
            while (i < s.x.size() && !usable(s.x[i], s.y[i])) ++i;
            if (i == s.x.size()) continue;
            double x0 = tx(s.x[i]), y0 = ty(s.y[i]);
            double ya = y0 + spec.slope * ((xlo + xpad) - x0);
            double yb = y0 + spec.slope * ((xhi - xpad) - x0);
            os << "<line x1=\"" << fmt_px(mx.at(xlo + xpad)) << "\" y1=\"" << fmt_px(my.at(ya))
               << "\" x2=\"" << fmt_px(mx.at(xhi - xpad)) << "\" y2=\"" << fmt_px(my.at(yb))
               << "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
            os << "<text x=\"" << fmt_px(W - mr - 6) << "\" y=\"" << fmt_px(my.at(yb) - 6)
               << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\" fill=\"#888888\">slope "
               << format_number(spec.slope) << "</text>\n";
            break;
        }
    }

    // series
    for (const auto& s : spec.series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
        if (s.dashed) os << " stroke-dasharray=\"5,4\"";
        os << " points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            if (!first) os << ' ';
            os << fmt_px(mx.at(tx(s.x[i]))) << ',' << fmt_px(my.at(ty(s.y[i])));
            first = false;
        }
        os << "\"/>\n";
    }

    // legend
    double ly = mt + 16;
    for (const auto& s : spec.series) {
        if (s.label.empty()) continue;
        os << "<line x1=\"" << fmt_px(ml + 10) << "\" y1=\"" << fmt_px(ly - 4) << "\" x2=\""
           << fmt_px(ml + 34) << "\" y2=\"" << fmt_px(ly - 4) << "\" stroke=\"" << s.color
           << "\" stroke-width=\"2\"" << (s.dashed ? " stroke-dasharray=\"5,4\"" : "") << "/>\n";
        os << "<text x=\"" << fmt_px(ml + 40) << "\" y=\"" << fmt_px(ly)
           << "\" font-family=\"monospace\" font-size=\"12\">" << esc(s.label) << "</text>\n";
        ly += 16;
    }

    // titles
    os << "<text x=\"" << fmt_px(W / 2) << "\" y=\"" << fmt_px(22)
       << "\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">" << esc(spec.title)
       << "</text>\n";
    os << "<text x=\"" << fmt_px(W / 2) << "\" y=\"" << fmt_px(H - 12)
       << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">" << esc(spec.xlabel)
       << "</text>\n";
    os << "<text x=\"" << fmt_px(16) << "\" y=\"" << fmt_px(H / 2)
       << "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << fmt_px(H / 2) << ")\">" << esc(spec.ylabel) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace smoothflow
