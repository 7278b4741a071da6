#pragma once

// Ratio of consecutive level spacings, r~_k = min(s_k, s_{k-1}) / max(s_k, s_{k-1}).

#include "dicke/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace dicke {

inline constexpr double kPoissonMeanRatio = 0.38629436111989061;  // 2 ln 2 - 1
inline constexpr double kGoeMeanRatio = 0.5307;
inline constexpr double kDegeneracyTolerance = 1e-13;

struct RatioSeries {
  std::vector<double> epsilons;  // energy of the middle level of each triple
  std::vector<double> ratios;
  std::size_t merged = 0;  // levels dropped as near-degenerate

  std::size_t size() const { return ratios.size(); }
};

/// Ratios of an ascending spectrum. Levels closer than `degeneracy_tol` to
/// their predecessor are merged into it and counted in `merged`.
RatioSeries consecutive_ratios(std::span<const double> energies,
                               double degeneracy_tol = kDegeneracyTolerance);

/// max(50, levels / 20).
int default_window(std::size_t levels);

struct WindowMean {
  double epsilon = 0.0;  // mean energy of the window
  double mean = 0.0;
  std::size_t count = 0;
};

/// Sliding mean over `window_levels` consecutive ratios, advanced by `stride`.
/// Windows shrink to the available ratios when the series is shorter.
std::vector<WindowMean> windowed_average(const RatioSeries& series, int window_levels,
                                         int stride = 1);

/// Mean of the windowed averages whose centers lie in [lo, hi].
double windowed_mean_in_range(const RatioSeries& series, int window_levels, double lo, double hi);

/// Ratio series of the converged states of a single-parity solution. Throws
/// ParameterError when the converged states mix parities.
RatioSeries converged_ratios(const EigenSolution& sol);

struct RatioMap {
  std::vector<double> gamma_grid;
  std::vector<double> epsilon_grid;
  /// mean(g, e): windowed <r~> of spectrum g centered at epsilon_grid[e];
  /// NaN where epsilon lies outside the converged range.
  Eigen::MatrixXd mean;
  int window_levels = 0;
};

/// One converged single-parity spectrum per coupling; window_levels <= 0
/// selects default_window for each spectrum.
RatioMap r_map(std::span<const EigenSolution> spectra, const std::vector<double>& epsilon_grid,
               int window_levels = 0);

}  // namespace dicke
