#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracbubble/experiments.hpp"
#include "fracbubble/field.hpp"

namespace fbcli {

/// Output directory that remembers every file it wrote, for the manifest.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    void text(const std::string& name, const std::string& content);
    void json(const std::string& name, const nlohmann::json& j);
    void field(const std::string& name, const fb::Field& u);

    /// manifest.json: command, files in write order with SHA-256 and size.
    void manifest(const std::string& command);

private:
    std::filesystem::path root_;
    std::vector<std::string> files_;
};

std::string sha256_file(const std::filesystem::path& p);

/// One row per sample: the sweep value followed by the measured columns.
std::string rate_csv(const fb::RateReport& r);
/// Log-log scatter of (fit_x, fit_y) with the fitted line.
std::string rate_svg(const fb::RateReport& r);
/// Grayscale heatmap of a 2D field (the middle x₃ slice for N = 3).
std::string heatmap_svg(const fb::Field& u, int max_cells = 128);

}  // namespace fbcli
