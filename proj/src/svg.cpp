#include "gridmarket/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <sstream>

namespace gridmarket {

namespace {

constexpr double kWidth = 900;
constexpr double kHeight = 420;
constexpr double kLeft = 80;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

std::string fixed(double v, int decimals = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string tickLabel(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
double niceStep(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

}  // namespace

std::string renderSvg(const LineChart& chart) {
    double xMin = std::numeric_limits<double>::infinity();
    double xMax = -xMin;
    double yMin = 0.0;  // charts are anchored at zero
    double yMax = -std::numeric_limits<double>::infinity();
    for (const auto& s : chart.series) {
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            xMin = std::min(xMin, x);
            xMax = std::max(xMax, x);
            yMin = std::min(yMin, y);
            yMax = std::max(yMax, y);
        }
    }
    if (!std::isfinite(xMin)) {
        xMin = 0;
        xMax = 1;
    }
    if (!std::isfinite(yMax)) yMax = 1;
    if (xMax == xMin) xMax = xMin + 1;
    if (yMax == yMin) yMax = yMin + 1;

    const double plotW = kWidth - kLeft - kRight;
    const double plotH = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xMin) / (xMax - xMin) * plotW; };
    auto sy = [&](double y) { return kTop + plotH - (y - yMin) / (yMax - yMin) * plotH; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(chart.title)
       << "</text>\n";

    os << "<g class=\"axes\" stroke=\"#333\" stroke-width=\"1\">\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plotH << "\" x2=\"" << kLeft + plotW << "\" y2=\""
       << kTop + plotH << "\"/>\n";
    os << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plotH << "\"/>\n";
    os << "</g>\n";

    os << "<g class=\"ticks\" fill=\"#333\">\n";
    const double xStep = niceStep(xMax - xMin, 8);
    for (double x = std::ceil(xMin / xStep) * xStep; x <= xMax + 1e-9 * xStep; x += xStep) {
        os << "<text x=\"" << fixed(sx(x)) << "\" y=\"" << kTop + plotH + 18 << "\" text-anchor=\"middle\">"
           << tickLabel(x) << "</text>\n";
    }
    const double yStep = niceStep(yMax - yMin, 6);
    for (double y = std::ceil(yMin / yStep) * yStep; y <= yMax + 1e-9 * yStep; y += yStep) {
        os << "<text x=\"" << kLeft - 8 << "\" y=\"" << fixed(sy(y) + 4) << "\" text-anchor=\"end\">" << tickLabel(y)
           << "</text>\n";
        os << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(sy(y)) << "\" x2=\"" << kLeft + plotW << "\" y2=\""
           << fixed(sy(y)) << "\" stroke=\"#ddd\"/>\n";
    }
    os << "</g>\n";
    os << "<text x=\"" << kLeft + plotW / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
       << escape(chart.xLabel) << "</text>\n";
    os << "<text x=\"18\" y=\"" << kTop + plotH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << kTop + plotH / 2 << ")\">" << escape(chart.yLabel) << "</text>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = kPalette[i % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            os << (first ? "" : " ") << fixed(sx(x)) << ',' << fixed(sy(y));
            first = false;
        }
        os << "\"><title>" << escape(s.label) << "</title></polyline>\n";

        const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
        os << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 40
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kWidth - kRight + 46 << "\" y=\"" << ly + 4 << "\">" << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace gridmarket
