#pragma once
#include <filesystem>
#include <string>
#include <vector>
#include <json.hpp>
#include <svreg/metrics.hpp>

namespace svreg::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Table
{
    std::vector<std::string> header;
    Matrix values;
};

/// Comma-separated, header row required. Errors name the file and 1-based line.
Table read_csv(const fs::path& path);
std::string csv_text(const std::vector<std::string>& header, const Matrix& values);

/// Reads X.csv, Z.csv and y.csv (single column) into a Dataset and validates it.
Dataset read_dataset(const fs::path& x, const fs::path& z, const fs::path& y);
void write_dataset(const fs::path& dir, const Dataset& d);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);

/// Group files use 1-based indices, matching column numbers users see.
json groups_to_json(const GroupSpec& gs);
GroupSpec groups_from_json(const json& j);

json truth_to_json(const SelectionTruth& t);
SelectionTruth truth_from_json(const json& j);

json coefficients_to_json(const CoefficientSet& c);
CoefficientSet coefficients_from_json(const json& j);

json fit_to_json(const FitResult& fit, const CoefficientSet& original, const FitConfig& cfg, Method method);
json cv_to_json(const CVResult& cv);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const fs::path& path);

/**
 * Writes manifest.json into `dir`: command, config, seeds, SHA-256 of every
 * input and of every output already present in `outputs`, tool version and a
 * UTC timestamp. The timestamp is the only field that changes between reruns.
 */
void write_manifest(
    const fs::path& dir,
    const std::string& command,
    const json& config,
    const std::vector<fs::path>& inputs,
    const std::vector<fs::path>& outputs
);

constexpr const char* kToolVersion = "0.1.0";

} // namespace svreg::io
