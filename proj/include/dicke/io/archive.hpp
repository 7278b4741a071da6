#pragma once

// Self-describing result archives (JSON) and plain-text plot exports.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace dicke::io {

struct Column {
  std::string name;
  std::string unit;
  std::vector<double> values;  // NaN round-trips through JSON null
};

struct Dataset {
  std::string name;
  std::vector<Column> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().values.size(); }
  const Column& column(const std::string& name) const;
  Dataset& add(std::string name, std::string unit, std::vector<double> values);
};

/// Everything in `metadata` and `datasets` is a deterministic function of
/// the config and code version; wall-clock information lives in the run log
/// written next to the archive.
struct ResultArchive {
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<Dataset> datasets;

  const Dataset& dataset(const std::string& name) const;
  bool has(const std::string& name) const;
  std::vector<std::string> names() const;
  Dataset& add(std::string name);
};

inline constexpr const char* kArchiveFormat = "dicke-lab-archive";
inline constexpr int kArchiveVersion = 1;

nlohmann::json to_json(const ResultArchive& archive);
ResultArchive archive_from_json(const nlohmann::json& doc);

void write_archive(const ResultArchive& archive, const std::filesystem::path& file);
ResultArchive read_archive(const std::filesystem::path& file);

// --- plot exports -------------------------------------------------------------

struct RecipeColumn {
  std::string source;  // column in the dataset
  std::string label;   // header name in the export
};

struct FigureRecipe {
  std::string name;
  std::string dataset;
  std::vector<RecipeColumn> columns;
  std::vector<std::string> metadata_keys;  // copied into the sidecar when present
  std::string description;
};

const std::vector<FigureRecipe>& figure_recipes();
const FigureRecipe& figure_recipe(const std::string& name);

/// Writes `<dir>/<recipe>.csv` and `<dir>/<recipe>.meta.json`; returns the
/// csv path. Throws RecipeError listing the archive's datasets if the one
/// required is missing.
std::filesystem::path export_plot_data(const ResultArchive& archive, const std::string& recipe,
                                       const std::filesystem::path& dir);

/// Parses an exported csv back into a dataset (header "name [unit]").
Dataset read_plot_data(const std::filesystem::path& csv);

/// 17 significant digits; "nan" for NaN.
std::string format_number(double v);

}  // namespace dicke::io
