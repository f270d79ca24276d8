#include "aniso/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "aniso/grid.hpp"  // atomic_write_text

namespace aniso {

namespace {

const char* kPalette[6] = {"#1965b0", "#dc050c", "#4eb265", "#f7a94a", "#882e72", "#777777"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

// tick step from the 1/2/5 ladder so that 4..8 ticks cover the range
double nice_step(double range) {
    if (!(range > 0.0)) return 1.0;
    const double raw = range / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

struct Mapper {
    double lo, hi, p0, p1;
    bool log_scale;
    double operator()(double v) const {
        const double t = log_scale ? (std::log(v) - std::log(lo)) / (std::log(hi) - std::log(lo))
                                   : (v - lo) / (hi - lo);
        return p0 + t * (p1 - p0);
    }
};

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
    if (series.empty()) throw std::invalid_argument("render_svg: no series");
    double xlo = HUGE_VAL, xhi = -HUGE_VAL, ylo = HUGE_VAL, yhi = -HUGE_VAL;
    for (const PlotSeries& s : series) {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("render_svg: series x/y length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (opt.log_y && !(s.y[i] > 0.0)) continue;
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    }
    if (!(xlo <= xhi) || !(ylo <= yhi))
        throw std::invalid_argument("render_svg: no finite data points");
    if (xlo == xhi) { xlo -= 0.5; xhi += 0.5; }
    if (ylo == yhi) {
        if (opt.log_y) { ylo *= 0.5; yhi *= 2.0; }
        else { ylo -= 0.5; yhi += 0.5; }
    } else if (!opt.log_y) {
        const double pad = 0.05 * (yhi - ylo);
        ylo -= pad;
        yhi += pad;
    }

    const double ml = 72, mr = 24, mt = opt.title.empty() ? 24 : 48, mb = 52;
    const Mapper mx{xlo, xhi, ml, opt.width - mr, false};
    const Mapper my{ylo, yhi, opt.height - mb, mt, opt.log_y};

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) +
         "\" height=\"" + std::to_string(opt.height) + "\" viewBox=\"0 0 " +
         std::to_string(opt.width) + " " + std::to_string(opt.height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<g font-family=\"sans-serif\" font-size=\"12\">\n";

    auto line = [&](double x1, double y1, double x2, double y2, const char* style) {
        s += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
             "\" y2=\"" + fmt(y2) + "\" " + style + "/>\n";
    };

    // x ticks
    const double xs = nice_step(xhi - xlo);
    for (double v = std::ceil(xlo / xs) * xs; v <= xhi + 1e-9 * xs; v += xs) {
        const double px = mx(v);
        line(px, mt, px, opt.height - mb, "stroke=\"#dddddd\" stroke-width=\"1\"");
        s += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(opt.height - mb + 18) +
             "\" text-anchor=\"middle\">" + fmt(std::fabs(v) < 1e-12 * xs ? 0.0 : v) +
             "</text>\n";
    }
    // y ticks
    if (opt.log_y) {
        const int k0 = static_cast<int>(std::ceil(std::log10(ylo) - 1e-9));
        const int k1 = static_cast<int>(std::floor(std::log10(yhi) + 1e-9));
        for (int k = k0; k <= k1; ++k) {
            const double v = std::pow(10.0, k);
            const double py = my(v);
            line(ml, py, opt.width - mr, py, "stroke=\"#dddddd\" stroke-width=\"1\"");
            s += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(py + 4) +
                 "\" text-anchor=\"end\">1e" + std::to_string(k) + "</text>\n";
        }
        if (k1 < k0)  // no decade inside the range: label the endpoints
            for (double v : {ylo, yhi}) {
                const double py = my(v);
                s += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(py + 4) +
                     "\" text-anchor=\"end\">" + fmt(v) + "</text>\n";
            }
    } else {
        const double ys = nice_step(yhi - ylo);
        for (double v = std::ceil(ylo / ys) * ys; v <= yhi + 1e-9 * ys; v += ys) {
            const double py = my(v);
            line(ml, py, opt.width - mr, py, "stroke=\"#dddddd\" stroke-width=\"1\"");
            s += "<text x=\"" + fmt(ml - 6) + "\" y=\"" + fmt(py + 4) +
                 "\" text-anchor=\"end\">" + fmt(std::fabs(v) < 1e-12 * ys ? 0.0 : v) +
                 "</text>\n";
        }
    }
    // frame
    line(ml, mt, ml, opt.height - mb, "stroke=\"black\" stroke-width=\"1.5\"");
    line(ml, opt.height - mb, opt.width - mr, opt.height - mb,
         "stroke=\"black\" stroke-width=\"1.5\"");

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& sr = series[si];
        std::string pts;
        bool pen_down = false;
        std::string path;
        for (std::size_t i = 0; i < sr.x.size(); ++i) {
            const bool ok = std::isfinite(sr.x[i]) && std::isfinite(sr.y[i]) &&
                            (!opt.log_y || sr.y[i] > 0.0);
            if (!ok) {
                pen_down = false;
                continue;
            }
            path += (pen_down ? "L" : "M");
            path += fmt(mx(sr.x[i])) + " " + fmt(my(sr.y[i])) + " ";
            pen_down = true;
        }
        if (path.empty()) continue;
        s += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" +
             kPalette[si % 6] + "\" stroke-width=\"1.6\"/>\n";
    }

    // legend (skip when every label is empty)
    bool any_label = false;
    for (const PlotSeries& sr : series)
        if (!sr.label.empty()) any_label = true;
    if (any_label) {
        double ly = mt + 14;
        const double lx = opt.width - mr - 180;
        for (std::size_t si = 0; si < series.size(); ++si) {
            line(lx, ly - 4, lx + 22, ly - 4,
                 ("stroke=\"" + std::string(kPalette[si % 6]) + "\" stroke-width=\"2\"").c_str());
            s += "<text x=\"" + fmt(lx + 28) + "\" y=\"" + fmt(ly) + "\">" +
                 escape(series[si].label) + "</text>\n";
            ly += 17;
        }
    }

    if (!opt.title.empty())
        s += "<text x=\"" + fmt(opt.width / 2.0) + "\" y=\"24\" text-anchor=\"middle\" "
             "font-size=\"15\">" + escape(opt.title) + "</text>\n";
    if (!opt.x_label.empty())
        s += "<text x=\"" + fmt((ml + opt.width - mr) / 2.0) + "\" y=\"" +
             fmt(opt.height - 12) + "\" text-anchor=\"middle\">" + escape(opt.x_label) +
             "</text>\n";
    if (!opt.y_label.empty())
        s += "<text x=\"16\" y=\"" + fmt((mt + opt.height - mb) / 2.0) +
             "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
             fmt((mt + opt.height - mb) / 2.0) + ")\">" + escape(opt.y_label) + "</text>\n";
    s += "</g>\n</svg>\n";
    return s;
}

void write_svg(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
               const PlotOptions& opt) {
    atomic_write_text(path, render_svg(series, opt));
}

}  // namespace aniso
