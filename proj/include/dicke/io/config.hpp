#pragma once

// Run configuration: a JSON document with a fixed schema. Unknown keys and
// wrongly typed values are rejected with the path of the offending field.

#include "dicke/eth.hpp"
#include "dicke/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dicke::io {

inline const std::vector<std::string> kPipelines = {"spectrum", "chaos-map", "r-map",      "peres",
                                                    "eth-stats", "entropy",  "tc-compare", "dos"};

/// Either an explicit list or `count` evenly spaced points in [min, max].
struct Grid {
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;
  int count = 0;

  static Grid range(double lo, double hi, int n) { return {{}, lo, hi, n}; }
  static Grid list(std::vector<double> v) { return {std::move(v), 0.0, 0.0, 0}; }
  bool is_range() const { return values.empty(); }
  std::vector<double> points() const;
  bool operator==(const Grid&) const = default;
};

enum class ParityChoice { Even, Odd, Both };

struct ChaosMapConfig {
  Grid epsilon = Grid::range(-2.0, 2.0, 41);
  Grid gamma = Grid::range(0.0, 2.0, 21);
  int samples_per_cell = 200;
  double lambda_cut = 0.01;
  double t_final = 1000.0;
  double renormalize_dt = 1.0;
  bool operator==(const ChaosMapConfig&) const = default;
};

struct RatioMapConfig {
  Grid gamma = Grid::range(0.1, 2.0, 20);
  Grid epsilon = Grid::range(-2.0, 2.0, 81);
  int window = 0;  // 0: automatic
  bool operator==(const RatioMapConfig&) const = default;
};

struct ObservableConfig {
  double lo = -0.5;  // Peres / deviation range
  double hi = 2.0;
  int window = 0;  // microcanonical window in states; 0: j^2 / 9
  int stride = 1;
  double eth_lo = 0.5;  // distribution range
  double eth_hi = 1.0;
  double omega_max = 0.02;  // off-diagonal frequency cut, scaled energy
  int centering_window = kCenteringWindow;
  int bins = 40;
  ObservableRoute route = ObservableRoute::Mapping;
  bool operator==(const ObservableConfig&) const = default;
};

struct EntropyConfig {
  bool entanglement = true;
  bool shannon_fock = true;
  bool shannon_efficient = true;
  int window = 0;  // 0: j^2 / 9
  int stride = 1;
  bool operator==(const EntropyConfig&) const = default;
};

struct TavisCummingsConfig {
  int lambda_max = 0;  // 0: all blocks reaching below epsilon = 2
  int window = 0;
  bool operator==(const TavisCummingsConfig&) const = default;
};

struct DosConfig {
  Grid epsilon = Grid::range(-2.0, 2.0, 81);
  bool quantum = false;  // also count converged eigenvalues of both parities
  bool operator==(const DosConfig&) const = default;
};

struct RunConfig {
  std::string pipeline = "spectrum";
  ModelParams model = ModelParams::make(1.0, 1.0, 1.0, 5.0);
  BasisKind basis = BasisKind::Efficient;
  int cutoff = 80;
  ParityChoice parity = ParityChoice::Even;
  ConvergenceTolerances convergence;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string output = "out";
  bool cache = true;

  ChaosMapConfig chaos_map;
  RatioMapConfig r_map;
  ObservableConfig observables;
  EntropyConfig entropy;
  TavisCummingsConfig tc;
  DosConfig dos;

  std::vector<ParitySector> sectors() const;
  bool operator==(const RunConfig&) const;
};

/// Throws ConfigError naming the field path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// Default microcanonical window for pseudo-spin j.
int default_mic_window(double j);

std::string to_string(ParityChoice p);

}  // namespace dicke::io
