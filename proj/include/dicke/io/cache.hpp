#pragma once

// On-disk cache of convergence-filtered sector solutions keyed by
// (params, basis, job, tolerances).
// Files carry a format version and a crc32 of the payload; a damaged or
// mismatched file is reported and rebuilt.

#include "dicke/model.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

namespace dicke::io {

inline constexpr std::uint32_t kCacheVersion = 1;

std::string cache_key(const ModelParams& params, const BasisSpec& basis, EigenJob job,
                      const ConvergenceTolerances& tol);

void write_solution(const EigenSolution& sol, const std::string& key, const std::filesystem::path& file);
/// nullopt when the file is missing; throws NumericalError when it is damaged
/// or belongs to another key.
std::optional<EigenSolution> read_solution(const std::filesystem::path& file, const std::string& key);

class SolutionCache {
 public:
  /// Disabled cache.
  SolutionCache() = default;
  /// An empty root disables the cache.
  explicit SolutionCache(std::filesystem::path root);

  bool enabled() const { return !root_.empty(); }
  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path file_for(const std::string& key) const;

  /// Cached result, or `compute()` stored under an exclusive lock. A vectors
  /// entry also serves values-only requests. `hit` reports the outcome.
  EigenSolution get(const ModelParams& params, const BasisSpec& basis, EigenJob job,
                    const ConvergenceTolerances& tol, const std::function<EigenSolution()>& compute,
                    bool* hit = nullptr) const;

 private:
  std::filesystem::path root_;
};

}  // namespace dicke::io
