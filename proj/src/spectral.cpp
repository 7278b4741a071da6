#include "dicke/spectral.hpp"

#include "dicke/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dicke {

RatioSeries consecutive_ratios(std::span<const double> energies, double degeneracy_tol) {
  RatioSeries out;
  std::vector<double> levels;
  levels.reserve(energies.size());
  for (double e : energies) {
    if (!std::isfinite(e)) throw ParameterError("spectrum contains a non-finite level");
    if (!levels.empty()) {
      if (e < levels.back()) throw ParameterError("spectrum must be sorted ascending");
      if (e - levels.back() < degeneracy_tol) {
        ++out.merged;
        continue;
      }
    }
    levels.push_back(e);
  }
  if (levels.size() < 3) {
    throw ParameterError("ratio statistics need at least 3 distinct levels, got " +
                         std::to_string(levels.size()));
  }
  out.epsilons.reserve(levels.size() - 2);
  out.ratios.reserve(levels.size() - 2);
  for (std::size_t k = 1; k + 1 < levels.size(); ++k) {
    const double lower = levels[k] - levels[k - 1];
    const double upper = levels[k + 1] - levels[k];
    out.epsilons.push_back(levels[k]);
    out.ratios.push_back(std::min(lower, upper) / std::max(lower, upper));
  }
  return out;
}

int default_window(std::size_t levels) {
  return std::max(50, static_cast<int>(levels / 20));
}

std::vector<WindowMean> windowed_average(const RatioSeries& series, int window_levels, int stride) {
  if (window_levels < 10) throw ParameterError("window must contain at least 10 levels");
  if (stride < 1) throw ParameterError("window stride must be positive");
  const std::size_t n = series.size();
  std::vector<WindowMean> out;
  if (n == 0) return out;
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window_levels), n);
  for (std::size_t start = 0; start + w <= n; start += static_cast<std::size_t>(stride)) {
    double r = 0.0;
    double e = 0.0;
    for (std::size_t k = start; k < start + w; ++k) {
      r += series.ratios[k];
      e += series.epsilons[k];
    }
    out.push_back({e / w, r / w, w});
  }
  return out;
}

double windowed_mean_in_range(const RatioSeries& series, int window_levels, double lo, double hi) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const WindowMean& m : windowed_average(series, window_levels)) {
    if (m.epsilon < lo || m.epsilon > hi) continue;
    sum += m.mean;
    ++count;
  }
  if (count == 0) throw WindowError("no ratio window centered inside the requested energy range");
  return sum / count;
}

RatioSeries converged_ratios(const EigenSolution& sol) {
  const auto idx = sol.converged_indices();
  if (idx.empty()) throw ParameterError("solution has no converged states");
  const Parity first = sol.parity[idx.front()];
  std::vector<double> energies;
  energies.reserve(idx.size());
  for (std::size_t k : idx) {
    if (sol.parity[k] != first || first == Parity::Unresolved) {
      throw ParameterError("ratio statistics need converged states of a single resolved parity");
    }
    energies.push_back(sol.energies[k]);
  }
  return consecutive_ratios(energies);
}

RatioMap r_map(std::span<const EigenSolution> spectra, const std::vector<double>& epsilon_grid,
               int window_levels) {
  if (spectra.empty() || epsilon_grid.empty()) throw ParameterError("r map needs spectra and an energy grid");
  RatioMap map;
  map.epsilon_grid = epsilon_grid;
  map.window_levels = window_levels;
  map.mean = Eigen::MatrixXd::Constant(static_cast<long>(spectra.size()),
                                       static_cast<long>(epsilon_grid.size()),
                                       std::numeric_limits<double>::quiet_NaN());
  for (std::size_t g = 0; g < spectra.size(); ++g) {
    const EigenSolution& sol = spectra[g];
    map.gamma_grid.push_back(sol.params.gamma);
    const RatioSeries series = converged_ratios(sol);
    const int w = window_levels > 0 ? window_levels : default_window(series.size());
    const std::size_t width = std::min<std::size_t>(static_cast<std::size_t>(w), series.size());
    const std::size_t n = series.size();
    for (std::size_t e = 0; e < epsilon_grid.size(); ++e) {
      const double eps = epsilon_grid[e];
      if (eps < series.epsilons.front() || eps > series.epsilons.back()) continue;
      const auto it = std::lower_bound(series.epsilons.begin(), series.epsilons.end(), eps);
      const std::size_t center = static_cast<std::size_t>(it - series.epsilons.begin());
      const std::size_t start = std::min(n - width, center > width / 2 ? center - width / 2 : 0);
      double sum = 0.0;
      for (std::size_t k = start; k < start + width; ++k) sum += series.ratios[k];
      map.mean(static_cast<long>(g), static_cast<long>(e)) = sum / width;
    }
  }
  return map;
}

}  // namespace dicke
