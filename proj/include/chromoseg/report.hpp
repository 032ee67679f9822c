#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "chromoseg/metrics.hpp"

namespace chromoseg::report {

// Ratio metrics are stored as fractions in [0,1]; Hausdorff in pixels.
// Undefined values become null.
nlohmann::json to_json(const metrics::MetricsReport& report);

// counts plus row-normalised percentages (true class i predicted as j).
nlohmann::json confusion_to_json(const metrics::ConfusionMatrix& cm);

// One row per run, Table-style columns: ratio metrics as percentages.
std::string csv_header();
std::string csv_row(const std::string& run_name, const metrics::MetricsReport& report,
                    metrics::ClassScope scope);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace chromoseg::report
