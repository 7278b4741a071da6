#include "dicke/eth.hpp"

#include "dicke/basis_map.hpp"
#include "dicke/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dicke {

namespace {

constexpr std::size_t kBlock = 256;

void require_single_parity(const EigenSolution& sol, std::span<const std::size_t> states) {
  if (states.empty()) throw ParameterError("no states selected");
  const Parity first = states.front() < sol.size() ? sol.parity[states.front()] : Parity::Unresolved;
  for (std::size_t k : states) {
    if (k >= sol.size()) throw ParameterError("state index out of range");
    if (!sol.converged[k]) {
      throw ParameterError("state " + std::to_string(k) + " is not converged");
    }
    if (sol.parity[k] == Parity::Unresolved || sol.parity[k] != first) {
      throw ParameterError("observable matrices need converged states of one resolved parity");
    }
  }
  if (!sol.has_vectors()) throw ParameterError("solution carries no eigenvectors");
}

int tc_cutoff(const EigenSolution& sol, std::span<const std::size_t> states) {
  int top = 0;
  for (std::size_t k : states) top = std::max(top, sol.lambda.at(k));
  return top;
}

// Fock-layout diagonal of the observable, n or m_z + j.
Eigen::VectorXd fock_diagonal(ObservableKind kind, int two_j, int n_max) {
  const int nb = n_max + 1;
  Eigen::VectorXd d(static_cast<long>(two_j + 1) * nb);
  for (int a = 0; a <= two_j; ++a)
    for (int n = 0; n < nb; ++n) d(product_index(a, n, nb)) = kind == ObservableKind::PhotonNumber ? n : a;
  return d;
}

void check_mapped_norms(const Eigen::MatrixXd& mapped) {
  for (long c = 0; c < mapped.cols(); ++c) {
    const double deficit = 1.0 - mapped.col(c).squaredNorm();
    if (deficit > kMappingNormTolerance) {
      throw TruncationError("Fock mapping lost norm " + std::to_string(deficit) +
                            "; the mapping cutoff is too small");
    }
  }
}

// Evaluates `body(A, B)` with O restricted to the selected states equal to
// A^T B, where both blocks have one column per state.
template <typename Body>
void with_factors(const EigenSolution& sol, ObservableKind kind, std::span<const std::size_t> states,
                  ObservableRoute route, Body&& body) {
  const ModelParams& p = sol.params;
  if (!sol.block_vectors.empty()) {
    const int n_max = tc_cutoff(sol, states);
    const Eigen::MatrixXd phi = fock_states(sol, states, n_max);
    body(phi, (fock_diagonal(kind, p.two_j, n_max).asDiagonal() * phi).eval(), 0.0);
    return;
  }
  const bool mapped = sol.basis.kind == BasisKind::Efficient && kind == ObservableKind::ExcitedAtoms &&
                      route == ObservableRoute::Mapping;
  if (mapped) {
    const int n_max = 3 * sol.basis.cutoff;
    const Eigen::MatrixXd phi = fock_states(sol, states, n_max);
    check_mapped_norms(phi);
    body(phi, (fock_diagonal(kind, p.two_j, n_max).asDiagonal() * phi).eval(), 0.0);
    return;
  }
  Eigen::MatrixXd v(sol.coefficients.rows(), static_cast<long>(states.size()));
  for (std::size_t c = 0; c < states.size(); ++c) v.col(static_cast<long>(c)) = sol.coefficients.col(static_cast<long>(states[c]));
  const auto op = working_operator(
      p, sol.basis, kind == ObservableKind::PhotonNumber ? BasisOperator::PhotonNumber : BasisOperator::SpinZ);
  const Eigen::MatrixXd applied = op * v;
  body(v, applied, kind == ObservableKind::ExcitedAtoms ? p.j() : 0.0);
}

}  // namespace

std::string to_string(ObservableKind kind) {
  return kind == ObservableKind::PhotonNumber ? "photon_number" : "excited_atoms";
}

std::vector<std::size_t> states_in_range(const EigenSolution& sol, double lo, double hi) {
  std::vector<std::size_t> out;
  for (std::size_t k : sol.converged_indices()) {
    if (sol.energies[k] > lo && sol.energies[k] < hi) out.push_back(k);
  }
  return out;
}

ObservableMatrix observable_matrix(const EigenSolution& sol, ObservableKind kind,
                                   std::span<const std::size_t> states, bool scaled,
                                   ObservableRoute route) {
  require_single_parity(sol, states);
  ObservableMatrix obs;
  obs.kind = kind;
  obs.scaled = scaled;
  obs.states.assign(states.begin(), states.end());
  for (std::size_t k : states) obs.energies.push_back(sol.energies[k]);
  with_factors(sol, kind, states, route, [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double shift) {
    obs.elements = a.transpose() * b;
    obs.elements = 0.5 * (obs.elements + obs.elements.transpose()).eval();
    obs.elements.diagonal().array() += shift;
  });
  if (scaled) obs.elements /= sol.params.j();
  return obs;
}

Eigen::VectorXd observable_diagonal(const EigenSolution& sol, ObservableKind kind,
                                    std::span<const std::size_t> states, bool scaled,
                                    ObservableRoute route) {
  require_single_parity(sol, states);
  Eigen::VectorXd out(static_cast<long>(states.size()));
  for (std::size_t start = 0; start < states.size(); start += kBlock) {
    const std::size_t len = std::min(kBlock, states.size() - start);
    with_factors(sol, kind, states.subspan(start, len), route,
                 [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double shift) {
                   out.segment(static_cast<long>(start), static_cast<long>(len)) =
                       (a.array() * b.array()).colwise().sum().transpose() + shift;
                 });
  }
  if (scaled) out /= sol.params.j();
  return out;
}

// --- microcanonical ---------------------------------------------------------------

double microcanonical_average(std::span<const double> energies, std::span<const double> values,
                              const MicrocanonicalWindow& window) {
  if (energies.size() != values.size()) throw ParameterError("energies and values differ in length");
  std::vector<std::size_t> order(energies.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t take = 0;
  if (window.count > 0) {
    take = std::min<std::size_t>(static_cast<std::size_t>(window.count), order.size());
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return std::abs(energies[x] - window.center) < std::abs(energies[y] - window.center);
    });
  } else if (window.half_width > 0.0) {
    std::erase_if(order, [&](std::size_t k) { return std::abs(energies[k] - window.center) > window.half_width; });
    take = order.size();
  } else {
    throw ParameterError("microcanonical window needs a level count or a half width");
  }
  if (take == 0) throw WindowError("microcanonical window is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += values[order[i]];
  return sum / take;
}

double microcanonical_average(const ObservableMatrix& obs, const MicrocanonicalWindow& window) {
  const Eigen::VectorXd d = obs.diagonal();
  return microcanonical_average(obs.energies, std::span<const double>(d.data(), d.size()), window);
}

double delta_mic(std::span<const double> values) {
  if (values.empty()) throw WindowError("empty window");
  const double total = std::accumulate(values.begin(), values.end(), 0.0);
  if (total == 0.0) throw WindowError("deviation undefined: the window sums to zero");
  const double mic = total / values.size();
  double dev = 0.0;
  for (double v : values) dev += std::abs(v - mic);
  return dev / total;
}

double delta_mic_extremal(std::span<const double> values) {
  if (values.empty()) throw WindowError("empty window");
  const double mic = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  if (mic == 0.0) throw WindowError("extremal deviation undefined: O_mic vanishes");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return std::abs(*hi - *lo) / mic;
}

std::vector<DeviationPoint> delta_mic_profile(std::span<const double> energies,
                                              std::span<const double> values, int window_levels,
                                              int stride) {
  if (energies.size() != values.size()) throw ParameterError("energies and values differ in length");
  if (window_levels < 1) throw ParameterError("window must hold at least one state");
  if (stride < 1) throw ParameterError("window stride must be positive");
  std::vector<DeviationPoint> out;
  const std::size_t w = static_cast<std::size_t>(window_levels);
  for (std::size_t start = 0; start + w <= values.size(); start += static_cast<std::size_t>(stride)) {
    const auto part = values.subspan(start, w);
    const double e = std::accumulate(energies.begin() + start, energies.begin() + start + w, 0.0) / w;
    out.push_back({e, delta_mic(part), delta_mic_extremal(part)});
  }
  return out;
}

// --- distributions ----------------------------------------------------------------

bool MomentSummary::gaussian(double max_skewness, double max_excess_kurtosis) const {
  return !degenerate && std::abs(skewness) < max_skewness &&
         std::abs(excess_kurtosis) < max_excess_kurtosis;
}

MomentSummary sample_moments(std::span<const double> values, bool zero_mean) {
  MomentSummary m;
  m.count = values.size();
  if (values.empty()) throw SampleSizeError("no values to summarize");
  const double n = static_cast<double>(values.size());
  m.mean = zero_mean ? 0.0 : std::accumulate(values.begin(), values.end(), 0.0) / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  double scale = 0.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  for (double v : values) {
    const double d = v - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.sigma = std::sqrt(m2);
  m.degenerate = !(m.sigma > 1e-12 * std::max(1.0, scale));
  if (!m.degenerate) {
    m.skewness = m3 / (m2 * m.sigma);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

Histogram make_histogram(std::span<const double> values, int bins) {
  if (bins < 1) throw ParameterError("histogram needs at least one bin");
  Histogram h;
  if (values.empty()) return h;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
  h.counts.assign(bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    h.counts[std::clamp(b, 0, bins - 1)]++;
  }
  return h;
}

std::vector<double> moving_mean(std::span<const double> values, int window) {
  if (window < 1) throw ParameterError("moving window must hold at least one state");
  const std::size_t n = values.size();
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(window), n);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t start = std::min(n - w, k > w / 2 ? k - w / 2 : 0);
    out[k] = std::accumulate(values.begin() + start, values.begin() + start + w, 0.0) / w;
  }
  return out;
}

Distribution diagonal_distribution(std::span<const double> energies,
                                   std::span<const double> values, double lo, double hi,
                                   int centering_window, int bins) {
  if (energies.size() != values.size()) throw ParameterError("energies and values differ in length");
  std::vector<double> selected;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (energies[k] > lo && energies[k] < hi) selected.push_back(values[k]);
  if (selected.size() < kMinDistributionStates) {
    throw SampleSizeError("diagonal distribution needs at least " +
                          std::to_string(kMinDistributionStates) + " states, got " +
                          std::to_string(selected.size()));
  }
  const std::vector<double> smooth = moving_mean(selected, centering_window);
  Distribution out;
  out.values.resize(selected.size());
  for (std::size_t k = 0; k < selected.size(); ++k) out.values[k] = selected[k] - smooth[k];
  out.fit = sample_moments(out.values);
  out.histogram = make_histogram(out.values, bins);
  return out;
}

Distribution offdiagonal_distribution(const ObservableMatrix& obs, double lo, double hi,
                                      double omega_max, bool zero_mean, int bins) {
  std::vector<std::size_t> inside;
  for (std::size_t k = 0; k < obs.energies.size(); ++k)
    if (obs.energies[k] > lo && obs.energies[k] < hi) inside.push_back(k);
  if (inside.size() < kMinDistributionStates) {
    throw SampleSizeError("off-diagonal distribution needs at least " +
                          std::to_string(kMinDistributionStates) + " states, got " +
                          std::to_string(inside.size()));
  }
  Distribution out;
  for (std::size_t x = 0; x < inside.size(); ++x)
    for (std::size_t y = x + 1; y < inside.size(); ++y) {
      const std::size_t a = inside[x], b = inside[y];
      if (std::abs(obs.energies[a] - obs.energies[b]) > omega_max) continue;
      out.values.push_back(obs.elements(static_cast<long>(a), static_cast<long>(b)));
    }
  if (out.values.empty()) throw SampleSizeError("no state pairs inside the frequency window");
  out.fit = sample_moments(out.values, zero_mean);
  out.histogram = make_histogram(out.values, bins);
  return out;
}

// --- diagonal ensemble -------------------------------------------------------------

double diagonal_ensemble(std::span<const double> weights, std::span<const double> values,
                         double leaked) {
  if (weights.size() != values.size()) throw ParameterError("weights and values differ in length");
  if (leaked > kSupportTolerance) {
    throw ConvergenceError("initial state has weight " + std::to_string(leaked) +
                           " outside the converged states");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total + leaked - 1.0) > kSupportTolerance) {
    throw ParameterError("eigenbasis weights do not sum to one (sum = " + std::to_string(total + leaked) + ")");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) sum += weights[k] * values[k];
  return sum;
}

Eigen::VectorXcd glauber_bloch_state(const PhaseSpacePoint& x, const ModelParams& params, int n_max) {
  params.validate();
  if (n_max < 0) throw ParameterError("n_max must be nonnegative");
  const double u = x.atomic_radius2();
  if (!(u <= 4.0)) throw ParameterError("phase-space point outside the atomic disk");
  const int nb = n_max + 1;
  const std::complex<double> alpha = std::sqrt(0.5 * params.j()) * std::complex<double>(x.q, x.p);

  Eigen::VectorXcd boson(nb);
  boson(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < nb; ++n) boson(n) = boson(n - 1) * alpha / std::sqrt(static_cast<double>(n));

  const int two_j = params.two_j;
  const double sin_half = 0.5 * std::sqrt(u);
  const double cos_half = std::sqrt(std::max(0.0, 1.0 - 0.25 * u));
  const double phi = std::atan2(x.P, x.Q);
  Eigen::VectorXcd spin(two_j + 1);
  for (int a = 0; a <= two_j; ++a) {
    double mag;
    if ((sin_half == 0.0 && a > 0) || (cos_half == 0.0 && a < two_j)) {
      mag = 0.0;
    } else {
      const double log_binom = std::lgamma(two_j + 1.0) - std::lgamma(a + 1.0) - std::lgamma(two_j - a + 1.0);
      const double log_mag = 0.5 * log_binom + (a > 0 ? a * std::log(sin_half) : 0.0) +
                             (a < two_j ? (two_j - a) * std::log(cos_half) : 0.0);
      mag = std::exp(log_mag);
    }
    spin(a) = std::polar(mag, a * phi);
  }
  Eigen::VectorXcd out(static_cast<long>(two_j + 1) * nb);
  for (int a = 0; a <= two_j; ++a) out.segment(static_cast<long>(a) * nb, nb) = spin(a) * boson;
  return out;
}

Eigen::VectorXcd parity_projection(const Eigen::VectorXcd& fock, int two_j, Parity parity) {
  if (parity == Parity::Unresolved) throw ParameterError("projection needs a definite parity");
  const long d = two_j + 1;
  if (fock.size() % d != 0) throw ParameterError("Fock vector length does not match 2j + 1");
  const long nb = fock.size() / d;
  const double s = parity == Parity::Even ? 1.0 : -1.0;
  Eigen::VectorXcd out = fock;
  for (long a = 0; a < d; ++a)
    for (long n = 0; n < nb; ++n) {
      const double pi = ((a + n) % 2 == 0) ? 1.0 : -1.0;
      out(a * nb + n) *= 0.5 * (1.0 + s * pi);
    }
  const double norm = out.norm();
  if (norm == 0.0) throw ParameterError("state has no weight in the requested parity sector");
  return out / norm;
}

std::vector<double> eigenbasis_weights(const EigenSolution& sol, const Eigen::VectorXcd& fock,
                                       int n_max) {
  if (!sol.has_vectors()) throw ParameterError("solution carries no eigenvectors");
  const ModelParams& p = sol.params;
  const int nb = n_max + 1;
  if (fock.size() != static_cast<long>(p.atomic_dim()) * nb) throw ParameterError("Fock vector has wrong length");
  std::vector<double> w(sol.size(), 0.0);

  if (!sol.block_vectors.empty()) {
    for (std::size_t k = 0; k < sol.size(); ++k) {
      if (sol.lambda[k] > n_max) continue;
      const Eigen::VectorXd v = fock_state(sol, k, n_max).values;
      w[k] = std::norm(v.cast<std::complex<double>>().dot(fock));
    }
    return w;
  }

  const SectorLayout layout(p, sol.basis);
  Eigen::MatrixXd product(layout.full_dim(), 2);
  for (int part = 0; part < 2; ++part) {
    CoefficientVector c{CoefficientBasis::Fock, p.two_j, nb,
                        part == 0 ? Eigen::VectorXd(fock.real()) : Eigen::VectorXd(fock.imag())};
    Eigen::VectorXd in_basis;
    if (sol.basis.kind == BasisKind::Efficient) {
      in_basis = project_fock_to_efficient(rotate_atomic_z_to_x(c), p, sol.basis.cutoff).values;
    } else {
      const int keep = std::min(nb, sol.basis.bosonic_dim());
      in_basis = Eigen::VectorXd::Zero(layout.full_dim());
      for (int a = 0; a < p.atomic_dim(); ++a)
        in_basis.segment(static_cast<long>(a) * sol.basis.bosonic_dim(), keep) =
            c.values.segment(static_cast<long>(a) * nb, keep);
    }
    product.col(part) = in_basis;
  }
  const Eigen::MatrixXd overlaps = sol.coefficients.transpose() * layout.restrict(product);
  for (std::size_t k = 0; k < sol.size(); ++k) w[k] = overlaps.row(static_cast<long>(k)).squaredNorm();
  return w;
}

}  // namespace dicke
