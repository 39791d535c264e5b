#pragma once

#include "steklov/records.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace steklov {

struct PlotSeries
{
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions
{
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 640;
    int height = 420;
};

/// Writes a standalone SVG line chart. Non-finite points, and nonpositive
/// points on log axes, are skipped.
void write_svg_line_chart(std::ostream& out, std::span<const PlotSeries> series, const PlotOptions& options = {});

/// One series per experiment id: column `x` against column `y`, where columns
/// are named as in the records CSV ("param.eps", "obs.error", ...).
std::vector<PlotSeries> series_from_records(std::span<const ExperimentRecord> records, const std::string& x,
                                            const std::string& y);

}  // namespace steklov
