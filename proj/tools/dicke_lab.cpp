// dicke-lab: command-line front end for the Dicke model pipelines.

#include "dicke/errors.hpp"
#include "dicke/io/archive.hpp"
#include "dicke/io/config.hpp"
#include "dicke/io/pipelines.hpp"
#include "dicke/log.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::vector<std::string> recipe_names() {
  std::vector<std::string> out;
  for (const auto& r : dicke::io::figure_recipes()) out.push_back(r.name);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chaos and thermalization in the Dicke model"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool no_cache = false;
  std::string pipeline;

  for (const auto& name : dicke::io::kPipelines) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " pipeline");
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides run.output)");
    sub->add_option("--seed", seed, "random seed (overrides run.seed)");
    sub->add_option("--threads", threads, "worker threads (overrides run.threads)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--no-cache", no_cache, "do not read or write the eigen-solution cache");
    sub->callback([&pipeline, name] { pipeline = name; });
  }

  std::string archive_path, recipe, export_dir = ".";
  CLI::App* exp = app.add_subcommand("export", "write plot data for one figure recipe");
  exp->add_option("archive", archive_path, "result archive (.json)")->required()->check(CLI::ExistingFile);
  exp->add_option("recipe", recipe, "one of: " + join(recipe_names()))->required();
  exp->add_option("--out", export_dir, "directory for the .csv and .meta.json files");

  std::string template_pipeline = "spectrum";
  CLI::App* tmpl = app.add_subcommand("config", "print a default configuration");
  tmpl->add_option("pipeline", template_pipeline, "pipeline name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*tmpl) {
      dicke::io::RunConfig c;
      c.pipeline = template_pipeline;
      std::cout << dicke::io::to_json(dicke::io::parse_config(dicke::io::to_json(c))).dump(2) << '\n';
      return 0;
    }
    if (*exp) {
      const auto archive = dicke::io::read_archive(archive_path);
      const auto csv = dicke::io::export_plot_data(archive, recipe, export_dir);
      std::cout << csv.string() << '\n';
      return 0;
    }

    dicke::io::RunConfig config = dicke::io::load_config(config_path);
    if (config.pipeline != pipeline) {
      dicke::log::warn("config names pipeline '" + config.pipeline + "'; running '" + pipeline + "'");
      config.pipeline = pipeline;
    }
    if (!out_dir.empty()) config.output = out_dir;
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    if (no_cache) config.cache = false;

    std::filesystem::path cache_root;
    if (const char* env = std::getenv("DICKE_CACHE"); env && *env) cache_root = env;
    const auto files = dicke::io::run_and_write(config, cache_root);
    std::cout << files.archive.string() << '\n';
    return 0;
  } catch (const dicke::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
