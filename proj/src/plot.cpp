#include "difflms/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "difflms/error.hpp"

namespace difflms {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_mse_svg(std::span<const NamedCurve> curves, const std::string& title) {
    std::size_t len = 0;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& c : curves) {
        len = std::max(len, c.curve.size());
        for (double v : c.curve.mse_db) {
            if (v <= kDbFloor) continue;
            lo = any ? std::min(lo, v) : v;
            hi = any ? std::max(hi, v) : v;
            any = true;
        }
    }
    lo = std::floor(lo / 5.0) * 5.0;
    hi = std::ceil(hi / 5.0) * 5.0;
    if (hi - lo < 5.0) hi = lo + 5.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](std::size_t i) {
        return kLeft + (len > 1 ? plot_w * static_cast<double>(i) / static_cast<double>(len - 1) : 0.0);
    };
    auto py = [&](double db) { return kTop + plot_h * (hi - std::clamp(db, lo, hi)) / (hi - lo); };

    std::ostringstream svg;
    char buf[128];
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(title) << "</text>\n";

    for (double tick = lo; tick <= hi + 1e-9; tick += 5.0) {
        std::snprintf(buf, sizeof buf, "%.1f", py(tick));
        svg << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << buf << "\" y2=\""
            << buf << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << buf << "\" text-anchor=\"end\">" << tick
            << "</text>\n";
    }
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\">iteration (1.." << len << ")</text>\n";
    svg << "<text transform=\"translate(18," << kTop + plot_h / 2
        << ") rotate(-90)\" text-anchor=\"middle\">network MSE (dB)</text>\n";

    std::size_t color = 0;
    for (const auto& c : curves) {
        const char* stroke = kColors[color % std::size(kColors)];
        svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.2\" points=\"";
        // At most ~2 points per horizontal pixel.
        const std::size_t stride = std::max<std::size_t>(1, c.curve.size() / 1400);
        for (std::size_t i = 0; i < c.curve.size(); i += stride) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(i), py(c.curve.mse_db[i]));
            svg << buf;
        }
        svg << "\"/>\n";
        const double ly = kTop + 18.0 + 16.0 * static_cast<double>(color);
        svg << "<line x1=\"" << kWidth - kRight - 110 << "\" x2=\"" << kWidth - kRight - 85 << "\" y1=\"" << ly
            << "\" y2=\"" << ly << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kWidth - kRight - 80 << "\" y=\"" << ly + 4 << "\">" << escape(c.label)
            << "</text>\n";
        ++color;
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_mse_plot(const std::filesystem::path& dir, std::span<const std::string> labels,
                    const std::string& title, const std::string& file_name) {
    std::vector<NamedCurve> curves;
    for (const auto& label : labels) {
        std::ifstream in(dir / ("curve_" + label + ".csv"));
        if (!in) throw Error("cannot read curve for '" + label + "' in " + dir.string());
        curves.push_back({label, read_curve_csv(in)});
    }
    std::ofstream out(dir / file_name, std::ios::binary);
    if (!out) throw Error("cannot write plot in " + dir.string());
    out << render_mse_svg(curves, title);
}

}  // namespace difflms
