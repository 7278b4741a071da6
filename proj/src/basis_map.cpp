#include "dicke/basis_map.hpp"

#include "dicke/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <mutex>
#include <string>
#include <unordered_map>

namespace dicke {

namespace {

constexpr double kRescaleHigh = 1e150;
constexpr double kRescaleLow = 1e-150;
const double kLogRescale = std::log(1e150);

void require_nonnegative(int n, int N) {
  if (n < 0 || N < 0) {
    throw ParameterError("displacement overlap needs nonnegative indices, got n=" +
                         std::to_string(n) + ", N=" + std::to_string(N));
  }
}

// Laguerre recurrence in the lower index with the factorial ratio folded in,
// f_i = sqrt(k! i!/(i+k)!) L_i^k(x), carried with a separate log scale so that
// neither the polynomial nor the prefactor over/underflows. Calls
// sink(i, |alpha|^k e^{-x/2} sqrt(i!/(i+k)!) L_i^k(x)) for i = 0..last.
template <typename Sink>
void scaled_overlaps(int k, int last, double alpha, Sink&& sink) {
  const double x = alpha * alpha;
  double log_scale = k * std::log(std::abs(alpha)) - 0.5 * x - 0.5 * std::lgamma(k + 1.0);
  double prev = 0.0;
  double cur = 1.0;
  for (int i = 0; i <= last; ++i) {
    sink(i, cur * std::exp(log_scale));
    double next;
    if (i == 0) {
      next = (1.0 + k - x) / std::sqrt(k + 1.0);
    } else {
      next = ((2.0 * i + 1.0 + k - x) * cur - std::sqrt(static_cast<double>(i) * (i + k)) * prev) /
             std::sqrt((i + 1.0) * (i + 1.0 + k));
    }
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleHigh) {
      cur /= kRescaleHigh;
      prev /= kRescaleHigh;
      log_scale += kLogRescale;
    } else if (std::abs(cur) < kRescaleLow && std::abs(prev) < kRescaleLow && cur != 0.0) {
      cur *= kRescaleHigh;
      prev *= kRescaleHigh;
      log_scale -= kLogRescale;
    }
  }
}

double odd_sign(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

// --- spin -------------------------------------------------------------------

double ladder_up(int two_j, int a) {
  const double j = 0.5 * two_j;
  const double m = a - j;
  return std::sqrt(std::max(0.0, j * (j + 1.0) - m * (m + 1.0)));
}

Eigen::MatrixXd spin_jz(int two_j) {
  const int d = two_j + 1;
  Eigen::MatrixXd jz = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < d; ++a) jz(a, a) = a - 0.5 * two_j;
  return jz;
}

Eigen::MatrixXd spin_jplus(int two_j) {
  const int d = two_j + 1;
  Eigen::MatrixXd jp = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a + 1 < d; ++a) jp(a + 1, a) = ladder_up(two_j, a);
  return jp;
}

Eigen::MatrixXd wigner_d_half_pi(int two_j) {
  if (two_j < 1) throw ParameterError("rotation needs 2j >= 1");
  const int d = two_j + 1;
  const Eigen::MatrixXd jp = spin_jplus(two_j);
  const Eigen::MatrixXd jx = 0.5 * (jp + jp.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jx);
  if (eig.info() != Eigen::Success) throw NumericalError("J_x eigensolver failed");
  Eigen::MatrixXd r = eig.eigenvectors();

  // Column m_x = j has d_{m,j}(pi/2) > 0 everywhere; anchor it on its largest
  // entry, then fix the remaining signs through R^T J_z R = -J_x, whose
  // sub-diagonal is negative.
  const Eigen::MatrixXd jz = spin_jz(two_j);
  if (r(two_j / 2, d - 1) < 0.0) r.col(d - 1) *= -1.0;
  for (int a = d - 1; a > 0; --a) {
    if (r.col(a).dot(jz * r.col(a - 1)) > 0.0) r.col(a - 1) *= -1.0;
  }
  return r;
}

const Eigen::MatrixXd& rotation_matrix(int two_j) {
  static std::shared_mutex mutex;
  static std::unordered_map<int, std::unique_ptr<Eigen::MatrixXd>> cache;
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(two_j); it != cache.end()) return *it->second;
  }
  auto r = std::make_unique<Eigen::MatrixXd>(wigner_d_half_pi(two_j));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.try_emplace(two_j, std::move(r));
  return *it->second;
}

// --- Laguerre / displacement --------------------------------------------------

double laguerre(int n, int k, double x) {
  if (n < 0 || k < 0) throw ParameterError("laguerre needs n, k >= 0");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + k - x;
  for (int i = 1; i < n; ++i) {
    const double next = ((2.0 * i + 1.0 + k - x) * cur - (i + k) * prev) / (i + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double displacement_element(int n, int N, double alpha) {
  require_nonnegative(n, N);
  if (alpha == 0.0) return n == N ? 1.0 : 0.0;
  const int lo = std::min(n, N);
  const int k = std::abs(n - N);
  double value = 0.0;
  scaled_overlaps(k, lo, alpha, [&](int i, double v) {
    if (i == lo) value = v;
  });
  if (alpha < 0.0) value *= odd_sign(k);
  if (n < N) value *= odd_sign(k);
  return value;
}

DisplacementKernel displacement_kernel(double alpha, int n_max, int N_max) {
  require_nonnegative(n_max, N_max);
  DisplacementKernel kernel{alpha, n_max, N_max, Eigen::MatrixXd::Zero(n_max + 1, N_max + 1)};
  auto& e = kernel.entries;
  if (alpha == 0.0) {
    for (int i = 0; i <= std::min(n_max, N_max); ++i) e(i, i) = 1.0;
    return kernel;
  }
  const int k_top = std::max(n_max, N_max);
  for (int k = 0; k <= k_top; ++k) {
    // n = N + k below the diagonal, N = n + k above it
    const int last_lower = std::min(N_max, n_max - k);
    const int last_upper = (k > 0) ? std::min(n_max, N_max - k) : -1;
    const int last = std::max(last_lower, last_upper);
    if (last < 0) continue;
    const double lower_sign = (alpha < 0.0) ? odd_sign(k) : 1.0;
    const double upper_sign = lower_sign * odd_sign(k);
    scaled_overlaps(k, last, alpha, [&](int i, double v) {
      if (i <= last_lower) e(i + k, i) = lower_sign * v;
      if (i <= last_upper) e(i, i + k) = upper_sign * v;
    });
  }
  return kernel;
}

std::shared_ptr<const DisplacementKernel> KernelCache::get(double alpha, int n_max, int N_max) {
  const Key key{alpha, n_max, N_max};
  {
    std::shared_lock lock(mutex_);
    if (auto it = kernels_.find(key); it != kernels_.end()) return it->second;
  }
  auto kernel = std::make_shared<const DisplacementKernel>(displacement_kernel(alpha, n_max, N_max));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = kernels_.try_emplace(key, std::move(kernel));
  return it->second;
}

std::size_t KernelCache::size() const {
  std::shared_lock lock(mutex_);
  return kernels_.size();
}

void KernelCache::clear() {
  std::unique_lock lock(mutex_);
  kernels_.clear();
}

KernelCache& KernelCache::global() {
  static KernelCache cache;
  return cache;
}

// --- maps ---------------------------------------------------------------------

double efficient_displacement(const ModelParams& params, int a) {
  return -params.G() * (a - params.j());
}

CoefficientVector map_efficient_to_fock(const CoefficientVector& coeffs,
                                        const ModelParams& params, int n_max) {
  if (coeffs.basis != CoefficientBasis::Efficient) {
    throw ParameterError("map_efficient_to_fock expects efficient-basis coefficients");
  }
  if (coeffs.two_j != params.two_j) throw ParameterError("coefficient vector j does not match params");
  const int N_max = coeffs.cutoff();
  if (n_max < 3 * N_max) {
    throw ParameterError("mapping cutoff n_max=" + std::to_string(n_max) +
                         " is below 3*N_max=" + std::to_string(3 * N_max));
  }
  CoefficientVector out{CoefficientBasis::FockRotated, coeffs.two_j, n_max + 1,
                        Eigen::VectorXd::Zero(static_cast<long>(coeffs.atomic_dim()) * (n_max + 1))};
  auto in_grid = coeffs.grid();
  auto out_grid = out.grid();
  for (int a = 0; a < coeffs.atomic_dim(); ++a) {
    auto kernel = KernelCache::global().get(efficient_displacement(params, a), n_max, N_max);
    out_grid.col(a).noalias() = kernel->entries * in_grid.col(a);
  }
  const double deficit = coeffs.values.squaredNorm() - out.values.squaredNorm();
  if (deficit > kMappingNormTolerance) {
    throw TruncationError("efficient->Fock mapping lost norm " + std::to_string(deficit) +
                          " at n_max=" + std::to_string(n_max));
  }
  return out;
}

Eigen::MatrixXd map_efficient_to_fock(const Eigen::MatrixXd& states, const ModelParams& params,
                                      int N_max, int n_max) {
  const int d = params.atomic_dim();
  const long nb_in = N_max + 1;
  const long nb_out = n_max + 1;
  if (states.rows() != d * nb_in) throw ParameterError("state block has wrong row count");
  Eigen::MatrixXd out(d * nb_out, states.cols());
  for (int a = 0; a < d; ++a) {
    const auto kernel = KernelCache::global().get(efficient_displacement(params, a), n_max, N_max);
    out.middleRows(a * nb_out, nb_out).noalias() =
        kernel->entries * states.middleRows(a * nb_in, nb_in);
  }
  return out;
}

CoefficientVector project_fock_to_efficient(const CoefficientVector& coeffs,
                                            const ModelParams& params, int N_max) {
  if (coeffs.basis != CoefficientBasis::FockRotated) {
    throw ParameterError("projection expects |n> (x) |j, m_x> coefficients");
  }
  if (coeffs.two_j != params.two_j) throw ParameterError("coefficient vector j does not match params");
  CoefficientVector out{CoefficientBasis::Efficient, coeffs.two_j, N_max + 1,
                        Eigen::VectorXd::Zero(static_cast<long>(coeffs.atomic_dim()) * (N_max + 1))};
  auto in_grid = coeffs.grid();
  auto out_grid = out.grid();
  for (int a = 0; a < coeffs.atomic_dim(); ++a) {
    auto kernel =
        KernelCache::global().get(efficient_displacement(params, a), coeffs.cutoff(), N_max);
    out_grid.col(a).noalias() = kernel->entries.transpose() * in_grid.col(a);
  }
  return out;
}

CoefficientVector rotate_atomic_x_to_z(const CoefficientVector& coeffs) {
  if (coeffs.basis != CoefficientBasis::FockRotated) {
    throw ParameterError("x->z rotation expects |n> (x) |j, m_x> coefficients");
  }
  CoefficientVector out = coeffs;
  out.basis = CoefficientBasis::Fock;
  out.grid() = coeffs.grid() * rotation_matrix(coeffs.two_j).transpose();
  return out;
}

CoefficientVector rotate_atomic_z_to_x(const CoefficientVector& coeffs) {
  if (coeffs.basis != CoefficientBasis::Fock) {
    throw ParameterError("z->x rotation expects |n> (x) |j, m_z> coefficients");
  }
  CoefficientVector out = coeffs;
  out.basis = CoefficientBasis::FockRotated;
  out.grid() = coeffs.grid() * rotation_matrix(coeffs.two_j);
  return out;
}

Eigen::MatrixXd rotate_atomic_x_to_z(const Eigen::MatrixXd& states, int two_j, int bosonic_dim) {
  const int d = two_j + 1;
  if (states.rows() != static_cast<long>(d) * bosonic_dim) {
    throw ParameterError("state block has wrong row count for rotation");
  }
  const Eigen::MatrixXd rt = rotation_matrix(two_j).transpose();
  Eigen::MatrixXd out(states.rows(), states.cols());
  for (long c = 0; c < states.cols(); ++c) {
    Eigen::Map<const Eigen::MatrixXd> in(states.col(c).data(), bosonic_dim, d);
    Eigen::Map<Eigen::MatrixXd> dst(out.col(c).data(), bosonic_dim, d);
    dst.noalias() = in * rt;
  }
  return out;
}

}  // namespace dicke
