#include "steklov/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>

namespace steklov {

namespace {

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v, bool log)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", log ? std::pow(10.0, v) : v);
    return buf;
}

std::optional<double> lookup(const ExperimentRecord& r, const std::string& column)
{
    auto find = [](const std::map<std::string, double>& m, const std::string& key) -> std::optional<double> {
        auto it = m.find(key);
        if (it == m.end()) return std::nullopt;
        return it->second;
    };
    if (column.rfind("param.", 0) == 0) return find(r.parameters, column.substr(6));
    if (column.rfind("obs.", 0) == 0) return find(r.observables, column.substr(4));
    if (column == "tolerance") return r.tolerance;
    throw std::invalid_argument("unknown column '" + column + "'");
}

}  // namespace

void write_svg_line_chart(std::ostream& out, std::span<const PlotSeries> series, const PlotOptions& options)
{
    const double left = 70, right = 20, top = 40, bottom = 50;
    const double w = options.width, h = options.height;
    const double pw = w - left - right, ph = h - top - bottom;

    auto tx = [&](double x) { return options.log_x ? std::log10(x) : x; };
    auto ty = [&](double y) { return options.log_y ? std::log10(y) : y; };
    auto usable = [&](double x, double y) {
        return std::isfinite(x) && std::isfinite(y) && (!options.log_x || x > 0) && (!options.log_y || y > 0);
    };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax - xmin <= 0) xmin -= 0.5, xmax += 0.5;
    if (ymax - ymin <= 0) ymin -= 0.5, ymax += 0.5;

    auto px = [&](double x) { return left + (tx(x) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + ph - (ty(y) - ymin) / (ymax - ymin) * ph; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty()) {
        out << "<text x=\"" << fixed(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
            << escape(options.title) << "</text>\n";
    }
    out << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw) << "\" height=\""
        << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double fx = xmin + (xmax - xmin) * k / 4, fy = ymin + (ymax - ymin) * k / 4;
        const double sx = left + pw * k / 4, sy = top + ph - ph * k / 4;
        out << "<text x=\"" << fixed(sx) << "\" y=\"" << fixed(top + ph + 16) << "\" text-anchor=\"middle\">"
            << tick_label(fx, options.log_x) << "</text>\n";
        out << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(sy + 4) << "\" text-anchor=\"end\">"
            << tick_label(fy, options.log_y) << "</text>\n";
    }
    if (!options.x_label.empty()) {
        out << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(h - 10) << "\" text-anchor=\"middle\">"
            << escape(options.x_label) << "</text>\n";
    }
    if (!options.y_label.empty()) {
        out << "<text transform=\"translate(14," << fixed(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
            << escape(options.y_label) << "</text>\n";
    }

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        std::string points;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            points += fixed(px(s.x[i])) + "," + fixed(py(s.y[i])) + " ";
        }
        if (!points.empty()) points.pop_back();
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
            << "\"/>\n";
        out << "<text x=\"" << fixed(left + pw - 6) << "\" y=\"" << fixed(top + 16 + 15 * k)
            << "\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(s.name) << "</text>\n";
    }
    out << "</svg>\n";
}

std::vector<PlotSeries> series_from_records(std::span<const ExperimentRecord> records, const std::string& x,
                                            const std::string& y)
{
    std::map<std::string, std::vector<std::pair<double, double>>> grouped;
    for (const auto& r : records) {
        const auto vx = lookup(r, x), vy = lookup(r, y);
        if (vx && vy) grouped[r.experiment].emplace_back(*vx, *vy);
    }
    std::vector<PlotSeries> out;
    for (auto& [name, pts] : grouped) {
        std::sort(pts.begin(), pts.end());
        PlotSeries s{name, {}, {}};
        for (const auto& [a, b] : pts) {
            s.x.push_back(a);
            s.y.push_back(b);
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace steklov
