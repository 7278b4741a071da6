#pragma once

// The eight pipelines behind `dicke-lab`, each turning a RunConfig into a
// ResultArchive.

#include "dicke/io/archive.hpp"
#include "dicke/io/cache.hpp"
#include "dicke/io/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace dicke::io {

/// Wall-clock record of a run: kept out of the archive so that archives of
/// identical runs are byte-identical.
struct RunLog {
  nlohmann::json entries = nlohmann::json::array();
  void add(const std::string& what, double seconds, bool cache_hit);
};

struct RunContext {
  SolutionCache cache;
  int threads = 0;
  RunLog* log = nullptr;
};

/// Diagonalization of one parity sector with the convergence filter against
/// the enlarged cutoff. The filtered result goes through the cache.
EigenSolution solve_sector(const ModelParams& params, BasisKind kind, int cutoff, ParitySector sector,
                           EigenJob job, const ConvergenceTolerances& tol, const RunContext& ctx);

/// The config as embedded in archives: run.output, run.cache and run.threads
/// do not affect results and are left out.
nlohmann::json provenance_config(const RunConfig& config);
/// crc32 of the compact provenance config, as 8 hex digits.
std::string config_hash(const RunConfig& config);

std::string code_version();

ResultArchive run_pipeline(const RunConfig& config, const RunContext& ctx);

struct RunFiles {
  std::filesystem::path archive;
  std::filesystem::path log;
};

/// Runs the pipeline and writes `<output>/<pipeline>.json` plus the run log
/// `<output>/<pipeline>.run.json`. The cache lives under `cache_root`, or
/// `<output>/cache` when that is empty.
RunFiles run_and_write(const RunConfig& config, const std::filesystem::path& cache_root = {});

}  // namespace dicke::io
