#include "dicke/entropy.hpp"

#include "dicke/errors.hpp"
#include "dicke/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace dicke {

namespace {

constexpr std::size_t kChunk = 64;

void check_norm(double norm2) {
  if (1.0 - norm2 > kReductionNormTolerance) {
    throw TruncationError("state norm deficit " + std::to_string(1.0 - norm2) +
                          " exceeds the truncation tolerance");
  }
}

double scaled_shannon(double s, double j) {
  const double base = std::log(2.0 * j * j);
  return base > 0.0 ? s / base : std::numeric_limits<double>::quiet_NaN();
}

// Columns grouped by atomic index: grid(n, a) = c_{n,a}.
Eigen::Map<const Eigen::MatrixXd> grid_of(const Eigen::VectorXd& v, int atomic_dim) {
  return {v.data(), v.size() / atomic_dim, atomic_dim};
}

}  // namespace

Eigen::MatrixXd reduce_to_atomic(const CoefficientVector& coeffs) {
  if (coeffs.basis == CoefficientBasis::Efficient) {
    throw ParameterError("map efficient-basis states to the Fock basis before tracing");
  }
  const double norm2 = coeffs.values.squaredNorm();
  check_norm(norm2);
  const auto g = grid_of(coeffs.values, coeffs.atomic_dim());
  return g.transpose() * g / norm2;
}

Eigen::MatrixXcd reduce_to_atomic(const Eigen::VectorXcd& fock, int two_j) {
  const int d = two_j + 1;
  if (fock.size() % d != 0) throw ParameterError("Fock vector length does not match 2j + 1");
  const double norm2 = fock.squaredNorm();
  check_norm(norm2);
  const Eigen::Map<const Eigen::MatrixXcd> g(fock.data(), fock.size() / d, d);
  // rho[m, m'] = Sum_n c_{n,m} conj(c_{n,m'})
  return (g.adjoint() * g).transpose() / norm2;
}

Eigen::MatrixXd reduce_to_bosonic(const CoefficientVector& coeffs) {
  if (coeffs.basis == CoefficientBasis::Efficient) {
    throw ParameterError("map efficient-basis states to the Fock basis before tracing");
  }
  const double norm2 = coeffs.values.squaredNorm();
  check_norm(norm2);
  const auto g = grid_of(coeffs.values, coeffs.atomic_dim());
  return g * g.transpose() / norm2;
}

double spectrum_entropy(std::span<const double> probabilities) {
  double s = 0.0;
  for (double p : probabilities)
    if (p > kEigenvalueFloor) s -= p * std::log(p);
  return s;
}

template <typename Matrix>
static double von_neumann_impl(const Matrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw ParameterError("density matrix must be square");
  const double trace = std::real(rho.trace());
  if (std::abs(trace - 1.0) > kTraceTolerance) {
    throw NormalizationError("density matrix trace " + std::to_string(trace) + " differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("density matrix eigensolver failed");
  const Eigen::VectorXd ev = es.eigenvalues();
  return spectrum_entropy(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

double von_neumann_entropy(const Eigen::MatrixXd& rho) { return von_neumann_impl(rho); }
double von_neumann_entropy(const Eigen::MatrixXcd& rho) { return von_neumann_impl(rho); }

double shannon_entropy(const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
  double s = 0.0;
  for (long i = 0; i < coeffs.size(); ++i) {
    const double p = coeffs(i) * coeffs(i);
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

double shannon_entropy(const CoefficientVector& coeffs) { return shannon_entropy(coeffs.values); }

std::string to_string(EntropyKind kind) {
  switch (kind) {
    case EntropyKind::Entanglement: return "entanglement";
    case EntropyKind::ShannonFock: return "shannon_fock";
    case EntropyKind::ShannonEfficient: return "shannon_efficient";
  }
  return "unknown";
}

double EntropyRecord::entanglement_scaled() const { return std::exp(S_En) / (2.0 * j + 1.0); }
double EntropyRecord::shannon_fock_scaled() const { return scaled_shannon(S_Sh_fock, j); }
double EntropyRecord::shannon_efficient_scaled() const { return scaled_shannon(S_Sh_eff, j); }

std::vector<EntropyRecord> entropy_lattice(const EigenSolution& sol, const std::set<EntropyKind>& which,
                                           std::span<const std::size_t> states, int threads) {
  if (!sol.has_vectors()) throw ParameterError("solution carries no eigenvectors");
  const bool tc = !sol.block_vectors.empty();
  const bool efficient = !tc && sol.basis.kind == BasisKind::Efficient;
  const bool want_en = which.count(EntropyKind::Entanglement) > 0;
  const bool want_fock = which.count(EntropyKind::ShannonFock) > 0;
  const bool want_eff = which.count(EntropyKind::ShannonEfficient) > 0;
  if (want_eff && !efficient) {
    throw ParameterError("the efficient-basis Shannon entropy needs an efficient-basis solution");
  }

  std::vector<std::size_t> idx(states.begin(), states.end());
  if (states.empty()) idx = sol.converged_indices();
  for (std::size_t k : idx) {
    if (k >= sol.size()) throw ParameterError("state index out of range");
    if (!sol.converged[k]) throw ConvergenceError("state " + std::to_string(k) + " is not converged");
  }

  int n_max = 0;
  if (tc) {
    for (std::size_t k : idx) n_max = std::max(n_max, sol.lambda[k]);
  } else {
    n_max = efficient ? 3 * sol.basis.cutoff : sol.basis.cutoff;
  }
  const int d = sol.params.atomic_dim();

  std::vector<EntropyRecord> out(idx.size());
  const std::size_t chunks = (idx.size() + kChunk - 1) / kChunk;
  parallel_for(
      chunks,
      [&](std::size_t c) {
        const std::size_t start = c * kChunk;
        const std::span<const std::size_t> part(idx.data() + start, std::min(kChunk, idx.size() - start));
        Eigen::MatrixXd fock, product;
        if (want_en || want_fock) fock = fock_states(sol, part, n_max);
        if (want_eff) product = product_states(sol, part);
        for (std::size_t i = 0; i < part.size(); ++i) {
          const std::size_t k = part[i];
          EntropyRecord& r = out[start + i];
          r.state = k;
          r.epsilon = sol.energies[k];
          r.parity = sol.parity[k];
          r.j = sol.params.j();
          const long col = static_cast<long>(i);
          if (want_en || want_fock) {
            const Eigen::VectorXd v = fock.col(col);
            const double norm2 = v.squaredNorm();
            check_norm(norm2);
            if (want_en) {
              const auto g = grid_of(v, d);
              r.S_En = von_neumann_entropy(Eigen::MatrixXd(g.transpose() * g / norm2));
            }
            if (want_fock) r.S_Sh_fock = shannon_entropy(v);
          }
          if (want_eff) r.S_Sh_eff = shannon_entropy(product.col(col));
        }
      },
      threads);
  return out;
}

}  // namespace dicke
