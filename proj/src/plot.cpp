#include "polyforest/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "polyforest/errors.hpp"

namespace polyforest {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 30, kTop = 40, kBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

AxisRange padded_range(double data_lo, double data_hi) {
    if (data_hi < data_lo) std::swap(data_lo, data_hi);
    double span = data_hi - data_lo;
    if (span <= 0.0) span = std::max(1.0, std::abs(data_hi));
    return AxisRange{data_lo - 0.05 * span, data_hi + 0.05 * span};
}

std::string render_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<PlotSeries>& series) {
    if (series.empty()) throw Error("render_svg: no series");
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || (!s.yerr.empty() && s.yerr.size() != s.y.size()))
            throw Error("render_svg: series length mismatch");
        for (size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            const double e = s.yerr.empty() ? 0.0 : s.yerr[i];
            ymin = std::min(ymin, s.y[i] - e);
            ymax = std::max(ymax, s.y[i] + e);
        }
    }
    const AxisRange xr = padded_range(xmin, xmax);
    const AxisRange yr = padded_range(ymin, ymax);
    auto px = [&](double x) {
        return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kWidth - kLeft - kRight);
    };
    auto py = [&](double y) {
        return kHeight - kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kHeight - kTop - kBottom);
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-size=\"15\" font-family=\"sans-serif\">" << title << "</text>\n";

    // axes
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double fx = xr.lo + (xr.hi - xr.lo) * t / 5.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * t / 5.0;
        svg << "<line x1=\"" << px(fx) << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
            << px(fx) << "\" y2=\"" << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px(fx) << "\" y=\"" << kHeight - kBottom + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << num(fx) << "</text>\n"
            << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << kLeft
            << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
            << num(fy) << "</text>\n";
    }
    svg << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xlabel
        << "</text>\n"
        << "<text x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 18 " << (kTop + kHeight - kBottom) / 2 << ")\">" << ylabel
        << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!s.yerr.empty() && s.yerr[i] > 0.0) {
                svg << "<line x1=\"" << px(s.x[i]) << "\" y1=\"" << py(s.y[i] - s.yerr[i])
                    << "\" x2=\"" << px(s.x[i]) << "\" y2=\"" << py(s.y[i] + s.yerr[i])
                    << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
            }
            svg << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i)
            svg << px(s.x[i]) << "," << py(s.y[i]) << " ";
        svg << "\"/>\n";
        svg << "<text x=\"" << kWidth - kRight - 10 << "\" y=\"" << kTop + 16 * (si + 1)
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\""
            << color << "\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::vector<std::string> emit_plots(const std::vector<SummaryRow>& summary,
                                    const std::string& out_dir) {
    if (summary.empty()) throw Error("emit_plots: empty summary");
    std::set<std::string> families;
    for (const auto& row : summary) families.insert(family_name(row.family));
    std::vector<std::string> written;
    for (const auto& fam : families) {
        std::map<int, PlotSeries> shd_series, prr_series;
        for (const auto& row : summary) {
            if (family_name(row.family) != fam) continue;
            auto& shd = shd_series[row.d];
            shd.label = "d=" + std::to_string(row.d);
            shd.x.push_back(row.n);
            shd.y.push_back(row.mean_shd_skeleton);
            shd.yerr.push_back(row.std_shd_skeleton);
            auto& prr_row = prr_series[row.d];
            prr_row.label = shd.label;
            prr_row.x.push_back(row.n);
            prr_row.y.push_back(row.prr_cpdag);
        }
        auto flatten = [](const std::map<int, PlotSeries>& m) {
            std::vector<PlotSeries> v;
            for (const auto& [d, s] : m) v.push_back(s);
            return v;
        };
        const std::string shd_path = out_dir + "/shd_" + fam + ".svg";
        const std::string prr_path = out_dir + "/prr_" + fam + ".svg";
        {
            std::ofstream out(shd_path);
            if (!out) throw Error("cannot write plot file: " + shd_path);
            out << render_svg("Skeleton SHD vs sample size (" + fam + ")", "sample size n",
                              "mean skeleton SHD", flatten(shd_series));
        }
        {
            std::ofstream out(prr_path);
            if (!out) throw Error("cannot write plot file: " + prr_path);
            out << render_svg("Exact recovery rate vs sample size (" + fam + ")",
                              "sample size n", "PRR", flatten(prr_series));
        }
        written.push_back(shd_path);
        written.push_back(prr_path);
    }
    return written;
}

}  // namespace polyforest
