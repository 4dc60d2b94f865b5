#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dimlab/dataset_io.hpp"
#include "dimlab/metrics.hpp"

/// Static SVG line charts built from the sweep and regression CSVs.
namespace dimlab::plot {

enum class PlotKind { AccuracyVsNtr, AutcVsD, RegressionDiff };

inline std::optional<PlotKind> parse_plot_kind(std::string_view s) {
    if (s == "accuracy_vs_ntr") return PlotKind::AccuracyVsNtr;
    if (s == "autc_vs_d") return PlotKind::AutcVsD;
    if (s == "regression_diff") return PlotKind::RegressionDiff;
    return std::nullopt;
}

struct Point {
    double x = 0.0;
    double y = 0.0;
    double err = 0.0;
};

struct Series {
    std::string label;
    std::vector<Point> points;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<Series> series;
};

// ---------------------------------------------------------------------------
// CSV tables

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        auto it = std::find(header.begin(), header.end(), name);
        require(it != header.end(), ErrorCode::Config, "missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    }

    double real(std::size_t row, std::size_t col) const {
        const std::string& s = rows[row][col];
        if (s == "nan") return std::nan("");
        try {
            return datagen::parse_real(s);
        } catch (const Error&) {
            fail(ErrorCode::Config, "row " + std::to_string(row + 2) + ": not a number: '" + s + "'");
        }
    }
};

inline Table read_table(std::istream& is) {
    Table t;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = datagen::split_csv_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        require(cells.size() == t.header.size(), ErrorCode::Config,
                "row " + std::to_string(t.rows.size() + 2) + " has " + std::to_string(cells.size()) + " cells, header has " +
                    std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    require(!t.header.empty(), ErrorCode::Config, "empty CSV");
    require(!t.rows.empty(), ErrorCode::Config, "CSV has a header but no data rows");
    return t;
}

inline bool spans_two_decades(double lo, double hi) { return lo > 0.0 && hi >= 100.0 * lo; }

inline void finish_axis(Chart& c) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : c.series)
        for (const auto& p : s.points) {
            lo = std::min(lo, p.x);
            hi = std::max(hi, p.x);
        }
    c.log_x = spans_two_decades(lo, hi);
}

/// Results CSV: mean and standard deviation of accuracy over repetitions, one
/// series per (d, nu). Failed cells are skipped.
inline Chart accuracy_vs_ntr(const Table& t) {
    const auto cd = t.column("d"), cnu = t.column("nu"), cn = t.column("n_tr"), cacc = t.column("accuracy");
    std::map<std::pair<double, double>, std::map<double, std::vector<double>>> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double acc = t.real(r, cacc);
        auto& bucket = groups[{t.real(r, cd), t.real(r, cnu)}][t.real(r, cn)];
        if (std::isfinite(acc)) bucket.push_back(acc);
    }
    Chart c{"Test accuracy", "training examples", "accuracy", false, {}};
    for (const auto& [key, by_n] : groups) {
        Series s{"d=" + datagen::format_real(key.first) + " nu=" + datagen::format_real(key.second), {}};
        for (const auto& [n, accs] : by_n) {
            if (accs.empty()) continue;
            const auto sum = metrics::summarize(std::span<const double>(accs));
            s.points.push_back({n, sum.mean, std::isfinite(sum.stddev) ? sum.stddev : 0.0});
        }
        if (!s.points.empty()) c.series.push_back(std::move(s));
    }
    finish_axis(c);
    return c;
}

/// Aggregate CSV: one series per nu over d.
inline Chart autc_vs_d(const Table& t) {
    const auto cd = t.column("d"), cnu = t.column("nu"), cm = t.column("autc_mean"), cs = t.column("autc_std");
    std::map<double, std::vector<Point>> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double m = t.real(r, cm);
        if (!std::isfinite(m)) continue;
        const double sd = t.real(r, cs);
        groups[t.real(r, cnu)].push_back({t.real(r, cd), m, std::isfinite(sd) ? sd : 0.0});
    }
    Chart c{"AUTC", "unnecessary dimensions d", "AUTC", false, {}};
    for (auto& [nu, pts] : groups) {
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
        c.series.push_back({"nu=" + datagen::format_real(nu), std::move(pts)});
    }
    return c;
}

/// Regression CSV: Error(with) - Error(without) against sigma_input, one
/// series per sigma_output.
inline Chart regression_diff(const Table& t) {
    const auto ci = t.column("sigma_input"), co = t.column("sigma_output"), cm = t.column("diff_with_without_mean"),
               cs = t.column("diff_with_without_std");
    std::map<double, std::vector<Point>> groups;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double m = t.real(r, cm);
        if (!std::isfinite(m)) continue;
        const double sd = t.real(r, cs);
        groups[t.real(r, co)].push_back({t.real(r, ci), m, std::isfinite(sd) ? sd : 0.0});
    }
    Chart c{"Error(with) - Error(without)", "input noise sigma", "error difference", false, {}};
    for (auto& [so, pts] : groups) {
        std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
        c.series.push_back({"sigma_out=" + datagen::format_real(so), std::move(pts)});
    }
    finish_axis(c);
    return c;
}

inline Chart build_chart(PlotKind kind, const Table& t) {
    Chart c;
    switch (kind) {
    case PlotKind::AccuracyVsNtr: c = accuracy_vs_ntr(t); break;
    case PlotKind::AutcVsD: c = autc_vs_d(t); break;
    case PlotKind::RegressionDiff: c = regression_diff(t); break;
    }
    require(!c.series.empty(), ErrorCode::Config, "no plottable rows");
    return c;
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string escape_xml(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += ch;
        }
    }
    return out;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

inline std::vector<double> linear_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return ticks;
}

inline const char* palette(std::size_t i) {
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                             "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[i % 10];
}

inline std::string render_svg(const Chart& chart, int width = 720, int height = 480) {
    const double left = 70, right = 180, top = 40, bottom = 60;
    const double pw = width - left - right, ph = height - top - bottom;

    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& s : chart.series)
        for (const auto& p : s.points) {
            const double x = chart.log_x ? std::log10(p.x) : p.x;
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, p.y - p.err);
            yhi = std::max(yhi, p.y + p.err);
        }
    if (xhi - xlo <= 0) {
        xlo -= 0.5;
        xhi += 0.5;
    }
    if (yhi - ylo <= 0) {
        ylo -= 0.5;
        yhi += 0.5;
    }
    const double ypad = 0.05 * (yhi - ylo);
    ylo -= ypad;
    yhi += ypad;

    auto sx = [&](double x) { return left + ((chart.log_x ? std::log10(x) : x) - xlo) / (xhi - xlo) * pw; };
    auto sxt = [&](double t) { return left + (t - xlo) / (xhi - xlo) * pw; };
    auto sy = [&](double y) { return top + (yhi - y) / (yhi - ylo) * ph; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape_xml(chart.title) << "</text>\n";

    // axes
    o << "<g stroke=\"black\" fill=\"none\">\n";
    o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
      << fmt(top + ph) << "\"/>\n";
    o << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(top + ph)
      << "\"/>\n";
    o << "</g>\n";

    std::vector<double> xticks;
    if (chart.log_x) {
        for (double e = std::ceil(xlo - 1e-9); e <= xhi + 1e-9; e += 1.0) xticks.push_back(e);
    } else {
        xticks = linear_ticks(xlo, xhi);
    }
    o << "<g class=\"x-ticks\">\n";
    for (double t : xticks) {
        const double px = sxt(t);
        o << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(px) << "\" y2=\""
          << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
          << escape_xml(tick_label(chart.log_x ? std::pow(10.0, t) : t)) << "</text>\n";
    }
    o << "</g>\n<g class=\"y-ticks\">\n";
    for (double t : linear_ticks(ylo, yhi)) {
        const double py = sy(t);
        o << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(py)
          << "\" stroke=\"black\"/>\n";
        o << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py + 4) << "\" text-anchor=\"end\">"
          << escape_xml(tick_label(t)) << "</text>\n";
    }
    o << "</g>\n";
    o << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(height - 15.0) << "\" text-anchor=\"middle\">"
      << escape_xml(chart.x_label + (chart.log_x ? " (log scale)" : "")) << "</text>\n";
    o << "<text x=\"18\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt(top + ph / 2) << ")\">" << escape_xml(chart.y_label) << "</text>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = palette(i);
        o << "<g class=\"series\" stroke=\"" << color << "\">\n";
        for (const auto& p : s.points) {
            if (p.err <= 0) continue;
            o << "<line class=\"errorbar\" x1=\"" << fmt(sx(p.x)) << "\" y1=\"" << fmt(sy(p.y - p.err)) << "\" x2=\""
              << fmt(sx(p.x)) << "\" y2=\"" << fmt(sy(p.y + p.err)) << "\"/>\n";
        }
        o << "<polyline fill=\"none\" stroke-width=\"2\" points=\"";
        for (std::size_t j = 0; j < s.points.size(); ++j)
            o << (j ? " " : "") << fmt(sx(s.points[j].x)) << "," << fmt(sy(s.points[j].y));
        o << "\"/>\n</g>\n";
    }

    o << "<g class=\"legend\">\n";
    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const double ly = top + 10 + 18.0 * static_cast<double>(i);
        o << "<line x1=\"" << fmt(left + pw + 15) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + pw + 35)
          << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << palette(i) << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << fmt(left + pw + 40) << "\" y=\"" << fmt(ly + 4) << "\">" << escape_xml(chart.series[i].label)
          << "</text>\n";
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

} // namespace dimlab::plot
