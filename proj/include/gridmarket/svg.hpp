#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gridmarket {

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

struct LineChart {
    std::string title;
    std::string xLabel;
    std::string yLabel;
    std::vector<ChartSeries> series;
};

/// Standalone SVG document: axes with ticks, one <polyline> per series, legend.
std::string renderSvg(const LineChart& chart);

}  // namespace gridmarket
