#pragma once

#include <string>
#include <vector>

#include "polyforest/harness.hpp"

namespace polyforest {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr;  // empty: no error bars
};

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;
};

// Smallest padded interval covering [data_lo, data_hi].
AxisRange padded_range(double data_lo, double data_hi);

std::string render_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<PlotSeries>& series);

// One SHD file and one PRR file per family present in the summary:
// x = sample size, one series per node count, std-dev error bars on SHD.
// Returns the written paths.
std::vector<std::string> emit_plots(const std::vector<SummaryRow>& summary,
                                    const std::string& out_dir);

}  // namespace polyforest
