#pragma once

#include "mmm/diagnostics.hpp"
#include "mmm/model.hpp"

#include <json.hpp>

#include <Eigen/Core>

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace mmm {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

/**
 * Parse a CSV panel with header `region,week,y,x1..xm,z1..zn`.
 *
 * Regions keep their order of first appearance and rows inside a region may
 * come in any order, but every region must cover the same contiguous run of
 * weeks exactly once. Errors carry the 1-based line and column of the
 * offending cell; `source` names the input in messages.
 */
PanelDataset parse_panel(std::istream& in, const std::string& source = "<panel>");
PanelDataset load_panel(const std::filesystem::path& path);

/// Canonical CSV text: regions in order, weeks ascending, numbers via format_number().
std::string format_panel(const PanelDataset& data);
void save_panel(const PanelDataset& data, const std::filesystem::path& path);

/// One row per draw, one column per parameter name.
std::string format_draws(const std::vector<std::string>& names, const Eigen::MatrixXd& draws);

/// Columns `bin,lower,upper,count`.
std::string format_histogram(const Histogram& histogram);

/// Writes `content` verbatim; throws IngestionError if the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

/// Variable indices in sign-constraint lists are 1-based in JSON.
Json spec_to_json(const ModelSpec& spec);
/// Fields absent from `json` keep the values already in `base`. Unknown keys
/// are rejected with IngestionError.
ModelSpec spec_from_json(const Json& json, ModelSpec base);

/// {"alpha_1": ..., ...} in flat layout order.
Json flat_to_json(const Eigen::VectorXd& flat, const ModelSpec& spec);
/// Inverse of flat_to_json(); every layout name must be present.
Eigen::VectorXd flat_from_json(const Json& json, const ModelSpec& spec);

}  // namespace mmm
