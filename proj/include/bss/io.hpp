#pragma once

// CSV matrices, scenario directories and JSON helpers shared by the CLI.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bss/matrix.hpp"
#include "bss/synth.hpp"
#include "json.hpp"

namespace bss {

using Json = nlohmann::json;

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double value);

/// Header row `labels`, then one line per matrix row; '.' decimals, LF endings.
void write_csv(const std::filesystem::path& path, const Matrix& m,
               const std::vector<std::string>& labels);
/// Labels prefix1 .. prefixK.
void write_csv(const std::filesystem::path& path, const Matrix& m, const std::string& prefix);

/// Reads a matrix written by write_csv; the header row is required and only
/// its column count is checked. Throws DataError on malformed content.
Matrix read_csv(const std::filesystem::path& path);

/// Two-column series `index_label,value_label` with indices first, first + 1, ...
void write_series_csv(const std::filesystem::path& path, const std::string& index_label,
                      const std::string& value_label, const std::vector<double>& values,
                      std::size_t first = 1);

void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);

/// Parses a scenario configuration. M, N, L and snr_db are required
/// (snr_db may be the string "inf"); unknown fields are rejected. Errors
/// are InvalidArgument messages naming the offending field.
ScenarioConfig scenario_config_from_json(const Json& j);
Json scenario_config_to_json(const ScenarioConfig& config);

inline constexpr int kManifestVersion = 1;

/// Writes Y.csv, C_true.csv, S_true.csv, peaks.csv and manifest.json.
void write_scenario(const std::filesystem::path& dir, const Scenario& scenario);

struct ScenarioData {
    Matrix Y;
    std::optional<Matrix> C_true;
    std::optional<Matrix> S_true;
    std::optional<int> M;  ///< from the manifest when present
    Json manifest;         ///< null when absent
};

/// Y.csv is required; manifest.json, C_true.csv and S_true.csv are optional.
ScenarioData read_scenario(const std::filesystem::path& dir);

}  // namespace bss
