#include "dicke/io/archive.hpp"

#include "dicke/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dicke::io {

using nlohmann::json;

const Column& Dataset::column(const std::string& col) const {
  for (const auto& c : columns)
    if (c.name == col) return c;
  std::string have;
  for (const auto& c : columns) have += (have.empty() ? "" : ", ") + c.name;
  throw RecipeError("dataset '" + name + "' has no column '" + col + "' (columns: " + have + ")");
}

Dataset& Dataset::add(std::string col, std::string unit, std::vector<double> values) {
  if (!columns.empty() && values.size() != rows()) {
    throw ParameterError("column '" + col + "' length differs from dataset '" + name + "'");
  }
  columns.push_back({std::move(col), std::move(unit), std::move(values)});
  return *this;
}

const Dataset& ResultArchive::dataset(const std::string& name) const {
  for (const auto& d : datasets)
    if (d.name == name) return d;
  std::string have;
  for (const auto& n : names()) have += (have.empty() ? "" : ", ") + n;
  throw RecipeError("archive has no dataset '" + name + "' (available: " + (have.empty() ? "none" : have) + ")");
}

bool ResultArchive::has(const std::string& name) const {
  for (const auto& d : datasets)
    if (d.name == name) return true;
  return false;
}

std::vector<std::string> ResultArchive::names() const {
  std::vector<std::string> out;
  for (const auto& d : datasets) out.push_back(d.name);
  return out;
}

Dataset& ResultArchive::add(std::string name) {
  if (has(name)) throw ParameterError("duplicate dataset '" + name + "'");
  datasets.push_back({std::move(name), {}});
  return datasets.back();
}

json to_json(const ResultArchive& archive) {
  json sets = json::array();
  for (const auto& d : archive.datasets) {
    json cols = json::array();
    for (const auto& c : d.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}, {"values", c.values}});
    sets.push_back({{"name", d.name}, {"rows", d.rows()}, {"columns", cols}});
  }
  return {{"format", kArchiveFormat}, {"version", kArchiveVersion}, {"metadata", archive.metadata}, {"datasets", sets}};
}

ResultArchive archive_from_json(const json& doc) {
  try {
    if (doc.at("format") != kArchiveFormat) throw ParameterError("not a result archive");
    if (doc.at("version") != kArchiveVersion) {
      throw ParameterError("unsupported archive version " + doc.at("version").dump());
    }
    ResultArchive a;
    a.metadata = doc.at("metadata");
    for (const auto& d : doc.at("datasets")) {
      Dataset& set = a.add(d.at("name").get<std::string>());
      for (const auto& c : d.at("columns")) {
        std::vector<double> values;
        for (const auto& v : c.at("values"))
          values.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
        set.add(c.at("name").get<std::string>(), c.at("unit").get<std::string>(), std::move(values));
      }
    }
    return a;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed archive: ") + e.what());
  }
}

void write_archive(const ResultArchive& archive, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + file.string());
  out << to_json(archive).dump() << '\n';
}

ResultArchive read_archive(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParameterError("cannot read " + file.string());
  try {
    return archive_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ParameterError(file.string() + ": " + e.what());
  }
}

// --- exports ------------------------------------------------------------------

const std::vector<FigureRecipe>& figure_recipes() {
  static const std::vector<FigureRecipe> recipes = {
      {"fig1a", "chaos_map", {{"epsilon", "epsilon"}, {"gamma", "gamma"}, {"fraction", "fraction"}},
       {"samples_per_cell", "lambda_cut", "seed", "t_final"}, "percentage of chaos over (epsilon, gamma)"},
      {"fig1b", "r_map", {{"epsilon", "epsilon"}, {"gamma", "gamma"}, {"mean_ratio", "mean_r"}},
       {"window_levels", "j"}, "windowed <r~> over (epsilon, gamma)"},
      {"fig2a", "peres", {{"epsilon", "epsilon"}, {"n", "n_kk/j"}}, {"j"}, "Peres lattice of n/j"},
      {"fig2b", "peres", {{"epsilon", "epsilon"}, {"n_ex", "nex_kk/j"}}, {"j"}, "Peres lattice of n_ex/j"},
      {"fig2c", "deviation", {{"epsilon", "epsilon"}, {"delta_n", "delta_mic"}, {"extremal_n", "delta_mic_e"}},
       {"j", "window_levels"}, "microcanonical deviations of n/j"},
      {"fig2d", "deviation",
       {{"epsilon", "epsilon"}, {"delta_nex", "delta_mic"}, {"extremal_nex", "delta_mic_e"}},
       {"j", "window_levels"}, "microcanonical deviations of n_ex/j"},
      {"fig3a", "eth_diagonal", {{"epsilon", "epsilon"}, {"n_centered", "n_kk/j - mean"}},
       {"j", "fit_diagonal_n", "eth_range"}, "centered diagonal elements of n/j"},
      {"fig3b", "eth_diagonal", {{"epsilon", "epsilon"}, {"nex_centered", "nex_kk/j - mean"}},
       {"j", "fit_diagonal_nex", "eth_range"}, "centered diagonal elements of n_ex/j"},
      {"fig3c", "eth_offdiagonal", {{"n", "n_kk'/j"}},
       {"j", "fit_offdiagonal_n", "fit_offdiagonal_n_all_pairs", "omega_max", "eth_range"},
       "off-diagonal elements of n/j"},
      {"fig3d", "eth_offdiagonal", {{"n_ex", "nex_kk'/j"}},
       {"j", "fit_offdiagonal_nex", "fit_offdiagonal_nex_all_pairs", "omega_max", "eth_range"},
       "off-diagonal elements of n_ex/j"},
      {"fig4a", "tc_entropy", {{"epsilon", "epsilon"}, {"exp_S_En_scaled", "exp(S_En)/(2j+1)"}}, {"j"},
       "entanglement lattice of the Tavis-Cummings model"},
      {"fig4b", "entropy", {{"epsilon", "epsilon"}, {"exp_S_En_scaled", "exp(S_En)/(2j+1)"}}, {"j"},
       "entanglement lattice of the Dicke model"},
      {"fig5a", "entropy",
       {{"epsilon", "epsilon"}, {"exp_S_En_scaled", "exp(S_En)/(2j+1)"}, {"S_En", "S_En"}}, {"j"},
       "entanglement entropy lattice"},
      {"fig5b", "entropy_deviation",
       {{"epsilon", "epsilon"}, {"delta_S_En", "delta_mic"}, {"extremal_S_En", "delta_mic_e"}},
       {"j", "window_levels"}, "microcanonical deviations of S_En"},
      {"fig6a", "entropy",
       {{"epsilon", "epsilon"},
        {"S_Sh_eff_scaled", "S_Sh_eff/ln(2j^2)"},
        {"S_Sh_fock_scaled", "S_Sh_fock/ln(2j^2)"},
        {"exp_S_Sh_eff", "exp(S_Sh_eff)"},
        {"exp_S_Sh_fock", "exp(S_Sh_fock)"}},
       {"j", "shannon_normalization"}, "Shannon entropy lattices in both bases"},
      {"fig6b", "entropy_deviation",
       {{"epsilon", "epsilon"},
        {"delta_S_Sh_eff", "delta_mic_eff"},
        {"extremal_S_Sh_eff", "delta_mic_e_eff"},
        {"delta_S_Sh_fock", "delta_mic_fock"},
        {"extremal_S_Sh_fock", "delta_mic_e_fock"}},
       {"j", "window_levels"}, "microcanonical deviations of the Shannon entropies"},
      {"fig7a", "entropy", {{"epsilon", "epsilon"}, {"S_Sh_eff_scaled", "S_Sh_eff/ln(2j^2)"}},
       {"j", "shannon_normalization"}, "efficient-basis Shannon lattice"},
      {"fig7b", "entropy_deviation",
       {{"epsilon", "epsilon"}, {"delta_S_Sh_eff", "delta_mic"}, {"extremal_S_Sh_eff", "delta_mic_e"}},
       {"j", "window_levels"}, "microcanonical deviations of the efficient-basis Shannon entropy"},
  };
  return recipes;
}

const FigureRecipe& figure_recipe(const std::string& name) {
  for (const auto& r : figure_recipes())
    if (r.name == name) return r;
  std::string have;
  for (const auto& r : figure_recipes()) have += (have.empty() ? "" : ", ") + r.name;
  throw RecipeError("unknown recipe '" + name + "' (recipes: " + have + ")");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::filesystem::path export_plot_data(const ResultArchive& archive, const std::string& recipe_name,
                                       const std::filesystem::path& dir) {
  const FigureRecipe& recipe = figure_recipe(recipe_name);
  const Dataset& data = archive.dataset(recipe.dataset);
  std::vector<const Column*> cols;
  for (const auto& rc : recipe.columns) cols.push_back(&data.column(rc.source));

  std::filesystem::create_directories(dir);
  const auto csv = dir / (recipe.name + ".csv");
  std::ofstream out(csv, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + csv.string());
  for (std::size_t c = 0; c < cols.size(); ++c)
    out << (c ? "," : "") << recipe.columns[c].label << " [" << cols[c]->unit << "]";
  out << '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << format_number(cols[c]->values[r]);
    out << '\n';
  }

  json meta = {{"recipe", recipe.name},
               {"description", recipe.description},
               {"dataset", recipe.dataset},
               {"rows", data.rows()}};
  for (const char* key : {"pipeline", "model", "config_hash", "code_version"})
    if (archive.metadata.contains(key)) meta[key] = archive.metadata.at(key);
  for (const auto& key : recipe.metadata_keys)
    if (archive.metadata.contains(key)) meta[key] = archive.metadata.at(key);
  std::ofstream side(dir / (recipe.name + ".meta.json"), std::ios::binary);
  side << meta.dump(2) << '\n';
  return csv;
}

Dataset read_plot_data(const std::filesystem::path& csv) {
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw ParameterError("cannot read " + csv.string());
  Dataset d{csv.stem().string(), {}};
  std::string line;
  if (!std::getline(in, line)) throw ParameterError(csv.string() + ": empty file");
  std::stringstream header(line);
  std::string field;
  while (std::getline(header, field, ',')) {
    const auto open = field.rfind(" [");
    if (open == std::string::npos || field.back() != ']') {
      throw ParameterError(csv.string() + ": header field '" + field + "' lacks a unit");
    }
    d.columns.push_back({field.substr(0, open), field.substr(open + 2, field.size() - open - 3), {}});
  }
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::size_t c = 0;
    while (std::getline(row, field, ',')) {
      if (c >= d.columns.size()) throw ParameterError(csv.string() + ": too many fields");
      double v;
      if (field == "nan") {
        v = std::numeric_limits<double>::quiet_NaN();
      } else if (field == "inf" || field == "-inf") {
        v = field[0] == '-' ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
      } else {
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
          throw ParameterError(csv.string() + ": bad number '" + field + "'");
        }
      }
      d.columns[c++].values.push_back(v);
    }
    if (c != d.columns.size()) throw ParameterError(csv.string() + ": short row");
  }
  return d;
}

}  // namespace dicke::io
