#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "difflms/metrics.hpp"

namespace difflms {

struct NamedCurve {
    std::string label;
    LearningCurve curve;
};

// MSE (dB) against iteration, one polyline per curve, as a standalone SVG.
std::string render_mse_svg(std::span<const NamedCurve> curves, const std::string& title);

// Reads curve_<label>.csv for each label in `dir` and writes `dir/file_name`.
void write_mse_plot(const std::filesystem::path& dir, std::span<const std::string> labels,
                    const std::string& title, const std::string& file_name = "mse.svg");

}  // namespace difflms
