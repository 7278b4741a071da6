#include "dicke/model.hpp"

#include "dicke/basis_map.hpp"
#include "dicke/errors.hpp"
#include "dicke/log.hpp"

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

namespace dicke {

// --- params -------------------------------------------------------------------

ModelParams ModelParams::make(double omega, double omega0, double gamma, double j) {
  const double twice = 2.0 * j;
  if (!(twice >= 1.0) || std::abs(twice - std::round(twice)) > 1e-12) {
    throw ParameterError("j must be a positive half-integer, got " + std::to_string(j));
  }
  ModelParams p{omega, omega0, gamma, static_cast<int>(std::lround(twice))};
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (!(omega > 0.0)) throw ParameterError("omega must be positive");
  if (!(omega0 > 0.0)) throw ParameterError("omega0 must be positive");
  if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
  if (two_j < 1) throw ParameterError("2j must be a positive integer");
}

std::string to_string(BasisKind kind) { return kind == BasisKind::Fock ? "fock" : "efficient"; }

std::string to_string(ParitySector sector) {
  switch (sector) {
    case ParitySector::Full: return "full";
    case ParitySector::Even: return "even";
    case ParitySector::Odd: return "odd";
  }
  return "full";
}

// --- layout ---------------------------------------------------------------------

std::vector<double> efficient_parity_phases(int two_j) {
  const Eigen::MatrixXd& r = rotation_matrix(two_j);
  const int d = two_j + 1;
  std::vector<double> phases(d);
  for (int a = 0; a < d; ++a) {
    double phi = 0.0;
    for (int z = 0; z < d; ++z) phi += r(z, d - 1 - a) * ((z % 2 == 0) ? 1.0 : -1.0) * r(z, a);
    phases[a] = phi;
  }
  return phases;
}

SectorLayout::SectorLayout(const ModelParams& params, const BasisSpec& basis)
    : basis_(basis), two_j_(params.two_j), full_dim_(basis.full_dim(params)) {
  params.validate();
  if (basis.cutoff < 0) throw ParameterError("boson cutoff must be nonnegative");
  const int d = params.atomic_dim();
  const int nb = basis.bosonic_dim();
  owner_.assign(full_dim_, -1);
  owner_weight_.assign(full_dim_, 0.0);

  auto push = [&](SectorState s) {
    for (int c = 0; c < s.count; ++c) {
      owner_[s.index[c]] = static_cast<long>(states_.size());
      owner_weight_[s.index[c]] = s.weight[c];
    }
    states_.push_back(s);
  };

  if (basis.sector == ParitySector::Full) {
    states_.reserve(full_dim_);
    for (int a = 0; a < d; ++a)
      for (int x = 0; x < nb; ++x) push({x, 1, {product_index(a, x, nb), 0}, {1.0, 0.0}});
    return;
  }

  const int s = basis.sector == ParitySector::Even ? 1 : -1;
  if (basis.kind == BasisKind::Fock) {
    for (int a = 0; a < d; ++a)
      for (int x = 0; x < nb; ++x)
        if (((x + a) % 2 == 0 ? 1 : -1) == s) push({x, 1, {product_index(a, x, nb), 0}, {1.0, 0.0}});
    return;
  }

  const std::vector<double> phases = efficient_parity_phases(params.two_j);
  const double h = 1.0 / std::sqrt(2.0);
  for (int a = d - 1; 2 * a >= d - 1; --a) {
    const int partner = d - 1 - a;
    for (int x = 0; x < nb; ++x) {
      const double image = ((x % 2 == 0) ? 1.0 : -1.0) * std::round(phases[a]);
      if (partner == a) {
        if (static_cast<int>(image) == s) push({x, 1, {product_index(a, x, nb), 0}, {1.0, 0.0}});
      } else {
        push({x, 2, {product_index(a, x, nb), product_index(partner, x, nb)}, {h, s * image * h}});
      }
    }
  }
}

std::optional<std::pair<long, double>> SectorLayout::locate(long i) const {
  if (i < 0 || i >= full_dim_ || owner_[i] < 0) return std::nullopt;
  return std::make_pair(owner_[i], owner_weight_[i]);
}

Eigen::MatrixXd SectorLayout::expand(const Eigen::Ref<const Eigen::MatrixXd>& v) const {
  if (v.rows() != dim()) throw ParameterError("vector length does not match the working basis");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(full_dim_, v.cols());
  for (long r = 0; r < dim(); ++r) {
    const SectorState& st = states_[r];
    for (int c = 0; c < st.count; ++c) out.row(st.index[c]) += st.weight[c] * v.row(r);
  }
  return out;
}

Eigen::MatrixXd SectorLayout::restrict(const Eigen::Ref<const Eigen::MatrixXd>& v) const {
  if (v.rows() != full_dim_) throw ParameterError("vector length does not match the product basis");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim(), v.cols());
  for (long r = 0; r < dim(); ++r) {
    const SectorState& st = states_[r];
    for (int c = 0; c < st.count; ++c) out.row(r) += st.weight[c] * v.row(st.index[c]);
  }
  return out;
}

Eigen::VectorXd SectorLayout::expand_vector(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  return expand(v);
}

// --- Hamiltonian -------------------------------------------------------------

namespace {

// Streams the nonzero product-basis elements (i, i', value) of H, each
// off-diagonal pair in both orders.
template <typename Visit>
void visit_fock_elements(const ModelParams& p, int n_max, Visit&& visit) {
  const int d = p.atomic_dim();
  const int nb = n_max + 1;
  const double coupling = p.gamma / std::sqrt(static_cast<double>(p.two_j));
  for (int a = 0; a < d; ++a) {
    for (int n = 0; n < nb; ++n) {
      const long i = product_index(a, n, nb);
      visit(i, i, p.omega * n + p.omega0 * (a - p.j()));
      if (n + 1 >= nb || coupling == 0.0) continue;
      const double boson = std::sqrt(n + 1.0);
      if (a + 1 < d) {
        const long k = product_index(a + 1, n + 1, nb);
        const double v = coupling * boson * ladder_up(p.two_j, a);
        visit(i, k, v);
        visit(k, i, v);
      }
      if (a > 0) {
        const long k = product_index(a - 1, n + 1, nb);
        const double v = coupling * boson * ladder_up(p.two_j, a - 1);
        visit(i, k, v);
        visit(k, i, v);
      }
    }
  }
}

// omega0 J_z = omega0 Sum_m T_{m+1,m} (|m+1><m| + h.c.) with T = -J_x in
// the rotated frame; the bosonic factor is <N'|D(alpha_m - alpha_{m+1})|N>.
template <typename Visit>
void visit_efficient_jz(const ModelParams& p, int N_max, Visit&& visit) {
  const int d = p.atomic_dim();
  const int nb = N_max + 1;
  auto kernel = KernelCache::global().get(p.G(), N_max, N_max);
  for (int a = 0; a + 1 < d; ++a) {
    const double t = -0.5 * ladder_up(p.two_j, a);
    for (int col = 0; col < nb; ++col) {
      for (int row = 0; row < nb; ++row) {
        const double v = t * kernel->entries(row, col);
        if (v == 0.0) continue;
        const long i = product_index(a + 1, row, nb);
        const long k = product_index(a, col, nb);
        visit(i, k, v);
        visit(k, i, v);
      }
    }
  }
}

template <typename Visit>
void visit_efficient_elements(const ModelParams& p, int N_max, Visit&& visit) {
  const int d = p.atomic_dim();
  const int nb = N_max + 1;
  const double g = p.G();
  for (int a = 0; a < d; ++a) {
    const double m = a - p.j();
    for (int n = 0; n < nb; ++n) {
      const long i = product_index(a, n, nb);
      visit(i, i, p.omega * n - p.omega * g * g * m * m);
    }
  }
  visit_efficient_jz(p, N_max, [&](long i, long k, double v) { visit(i, k, p.omega0 * v); });
}

// a^dag a = A^dag A - G J_x (A^dag + A) + G^2 J_x^2 over the efficient basis.
template <typename Visit>
void visit_efficient_photon_number(const ModelParams& p, int N_max, Visit&& visit) {
  const int d = p.atomic_dim();
  const int nb = N_max + 1;
  const double g = p.G();
  for (int a = 0; a < d; ++a) {
    const double m = a - p.j();
    for (int n = 0; n < nb; ++n) {
      const long i = product_index(a, n, nb);
      visit(i, i, n + g * g * m * m);
      if (n + 1 < nb && g != 0.0 && m != 0.0) {
        const long k = product_index(a, n + 1, nb);
        const double v = -g * m * std::sqrt(n + 1.0);
        visit(i, k, v);
        visit(k, i, v);
      }
    }
  }
}

template <typename Visit>
void visit_operator(const ModelParams& p, const BasisSpec& basis, BasisOperator op, Visit&& visit) {
  const int nb = basis.bosonic_dim();
  if (op == BasisOperator::Hamiltonian) {
    if (basis.kind == BasisKind::Fock) {
      visit_fock_elements(p, basis.cutoff, visit);
    } else {
      visit_efficient_elements(p, basis.cutoff, visit);
    }
    return;
  }
  if (basis.kind == BasisKind::Fock) {
    for (int a = 0; a < p.atomic_dim(); ++a)
      for (int n = 0; n < nb; ++n) {
        const long i = product_index(a, n, nb);
        visit(i, i, op == BasisOperator::PhotonNumber ? n : a - p.j());
      }
    return;
  }
  if (op == BasisOperator::PhotonNumber) {
    visit_efficient_photon_number(p, basis.cutoff, visit);
  } else {
    visit_efficient_jz(p, basis.cutoff, visit);
  }
}

template <typename Elements>
HamiltonianMatrix assemble(const ModelParams& params, const BasisSpec& basis, Elements&& elements) {
  params.validate();
  if (basis.cutoff < 0) throw ParameterError("boson cutoff must be nonnegative");
  HamiltonianMatrix h{{}, basis, params};
  if (basis.sector == ParitySector::Full) {
    const long n = basis.full_dim(params);
    h.entries = Eigen::MatrixXd::Zero(n, n);
    elements([&](long i, long k, double v) { h.entries(i, k) += v; });
    return h;
  }
  const SectorLayout layout(params, basis);
  h.entries = Eigen::MatrixXd::Zero(layout.dim(), layout.dim());
  elements([&](long i, long k, double v) {
    const auto ri = layout.locate(i);
    if (!ri) return;
    const auto rk = layout.locate(k);
    if (!rk) return;
    h.entries(ri->first, rk->first) += ri->second * rk->second * v;
  });
  return h;
}

}  // namespace

HamiltonianMatrix build_fock_hamiltonian(const ModelParams& params, int n_max,
                                         ParitySector sector) {
  if (n_max < 0) throw ParameterError("n_max must be nonnegative");
  const BasisSpec basis{BasisKind::Fock, n_max, sector};
  return assemble(params, basis, [&](auto&& visit) { visit_fock_elements(params, n_max, visit); });
}

HamiltonianMatrix build_efficient_hamiltonian(const ModelParams& params, int N_max,
                                              ParitySector sector) {
  if (N_max < 0) throw ParameterError("N_max must be nonnegative");
  const BasisSpec basis{BasisKind::Efficient, N_max, sector};
  return assemble(params, basis,
                  [&](auto&& visit) { visit_efficient_elements(params, N_max, visit); });
}

Eigen::SparseMatrix<double> working_operator(const ModelParams& params, const BasisSpec& basis,
                                             BasisOperator op) {
  params.validate();
  if (basis.cutoff < 0) throw ParameterError("boson cutoff must be nonnegative");
  const SectorLayout layout(params, basis);
  std::vector<Eigen::Triplet<double>> triplets;
  visit_operator(params, basis, op, [&](long i, long k, double v) {
    const auto ri = layout.locate(i);
    if (!ri) return;
    const auto rk = layout.locate(k);
    if (!rk) return;
    triplets.emplace_back(static_cast<int>(ri->first), static_cast<int>(rk->first),
                          ri->second * rk->second * v);
  });
  Eigen::SparseMatrix<double> out(layout.dim(), layout.dim());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.prune(0.0);
  return out;
}

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const BasisSpec& basis) {
  return basis.kind == BasisKind::Fock
             ? build_fock_hamiltonian(params, basis.cutoff, basis.sector)
             : build_efficient_hamiltonian(params, basis.cutoff, basis.sector);
}

// --- eigensolver ---------------------------------------------------------------

std::pair<Eigen::VectorXd, Eigen::MatrixXd> symmetric_eigensystem(Eigen::MatrixXd matrix,
                                                                  EigenJob job) {
  const long n = matrix.rows();
  if (matrix.cols() != n) throw ParameterError("eigensolver needs a square matrix");
  Eigen::VectorXd values(n);
  if (n == 0) return {values, Eigen::MatrixXd()};

  bool diagonal = true;
  for (long c = 0; c < n && diagonal; ++c)
    for (long r = 0; r < n; ++r)
      if (r != c && matrix(r, c) != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0L);
    std::stable_sort(order.begin(), order.end(),
                     [&](long x, long y) { return matrix(x, x) < matrix(y, y); });
    Eigen::MatrixXd vectors;
    if (job == EigenJob::Vectors) vectors = Eigen::MatrixXd::Zero(n, n);
    for (long k = 0; k < n; ++k) {
      values(k) = matrix(order[k], order[k]);
      if (job == EigenJob::Vectors) vectors(order[k], k) = 1.0;
    }
    return {values, vectors};
  }

  const char jobz = job == EigenJob::Vectors ? 'V' : 'N';
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', static_cast<lapack_int>(n),
                                         matrix.data(), static_cast<lapack_int>(n), values.data());
  if (info != 0) {
    throw NumericalError("dsyevd failed with info=" + std::to_string(info) + " on a " +
                         std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  if (job == EigenJob::ValuesOnly) return {values, Eigen::MatrixXd()};
  return {values, std::move(matrix)};
}

EigenSolution diagonalize(const HamiltonianMatrix& h, EigenJob job) {
  auto [values, vectors] = symmetric_eigensystem(h.entries, job);
  EigenSolution sol;
  sol.basis = h.basis;
  sol.params = h.params;
  const double j = h.params.j();
  sol.energies.resize(values.size());
  for (long k = 0; k < values.size(); ++k) sol.energies[k] = values(k) / j;
  sol.coefficients = std::move(vectors);
  Parity label = Parity::Unresolved;
  if (h.basis.sector == ParitySector::Even) label = Parity::Even;
  if (h.basis.sector == ParitySector::Odd) label = Parity::Odd;
  sol.parity.assign(sol.size(), label);
  sol.converged.assign(sol.size(), false);
  return sol;
}

std::vector<std::size_t> EigenSolution::converged_indices(std::optional<Parity> parity_filter) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size(); ++k) {
    if (!converged[k]) continue;
    if (parity_filter && parity[k] != *parity_filter) continue;
    out.push_back(k);
  }
  return out;
}

// --- convergence ---------------------------------------------------------------

int enlarged_cutoff(int cutoff) {
  return std::max(cutoff + 1, static_cast<int>(std::ceil(1.2 * cutoff)));
}

int tail_levels(int cutoff) {
  return std::max(1, static_cast<int>(std::lround(0.1 * (cutoff + 1))));
}

EigenSolution filter_converged(const EigenSolution& sol, const EigenSolution& larger,
                               double tol_energy, double tol_tail) {
  if (!(sol.params == larger.params)) throw ParameterError("convergence check with mismatched params");
  if (sol.basis.kind != larger.basis.kind || sol.basis.sector != larger.basis.sector) {
    throw ParameterError("convergence check needs the same basis kind and parity sector");
  }
  if (larger.basis.cutoff <= sol.basis.cutoff) {
    throw ParameterError("reference solution must use a strictly larger boson cutoff");
  }
  if (sol.coefficients.cols() == 0) throw ParameterError("convergence check needs eigenvectors");

  const SectorLayout layout(sol.params, sol.basis);
  const int first_tail = sol.basis.cutoff + 1 - tail_levels(sol.basis.cutoff);
  std::vector<long> tail_rows;
  for (long r = 0; r < layout.dim(); ++r)
    if (layout.states()[r].bosonic >= first_tail) tail_rows.push_back(r);

  EigenSolution out = sol;
  out.converged.assign(sol.size(), false);
  out.epsilon_T = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sol.size(); ++k) {
    if (k >= larger.size()) break;
    double tail = 0.0;
    for (long r : tail_rows) tail += sol.coefficients(r, k) * sol.coefficients(r, k);
    const bool ok = std::abs(sol.energies[k] - larger.energies[k]) < tol_energy && tail < tol_tail;
    if (!ok) break;
    out.converged[k] = true;
    out.epsilon_T = sol.energies[k];
  }
  return out;
}

// --- parity --------------------------------------------------------------------

Eigen::VectorXd parity_expectations(const Eigen::MatrixXd& fock_coeffs, int two_j, int bosonic_dim) {
  const int d = two_j + 1;
  if (fock_coeffs.rows() != static_cast<long>(d) * bosonic_dim) {
    throw ParameterError("Fock coefficient block has wrong row count");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(fock_coeffs.cols());
  for (long c = 0; c < fock_coeffs.cols(); ++c) {
    double sum = 0.0;
    for (int a = 0; a < d; ++a)
      for (int n = 0; n < bosonic_dim; ++n) {
        const double v = fock_coeffs(product_index(a, n, bosonic_dim), c);
        sum += ((a + n) % 2 == 0 ? 1.0 : -1.0) * v * v;
      }
    out(c) = sum;
  }
  return out;
}

EigenSolution assign_parity(const EigenSolution& sol, const Eigen::MatrixXd& fock_coeffs,
                            int fock_bosonic_dim) {
  if (fock_coeffs.cols() != static_cast<long>(sol.size())) {
    throw ParameterError("need one Fock coefficient column per state");
  }
  const Eigen::VectorXd expect = parity_expectations(fock_coeffs, sol.params.two_j, fock_bosonic_dim);
  EigenSolution out = sol;
  std::size_t unresolved_converged = 0;
  for (std::size_t k = 0; k < sol.size(); ++k) {
    if (expect(k) > 1.0 - kParityTolerance) {
      out.parity[k] = Parity::Even;
    } else if (expect(k) < -1.0 + kParityTolerance) {
      out.parity[k] = Parity::Odd;
    } else {
      out.parity[k] = Parity::Unresolved;
      if (sol.converged[k]) ++unresolved_converged;
    }
  }
  if (unresolved_converged > 0) {
    log::warn(std::to_string(unresolved_converged) +
              " converged states have unresolved parity; the Fock mapping cutoff is too small");
  }
  return out;
}

// --- state access --------------------------------------------------------------

namespace {

void require_vectors(const EigenSolution& sol) {
  if (!sol.has_vectors()) throw ParameterError("solution carries no eigenvectors");
}

void require_index(const EigenSolution& sol, std::size_t k) {
  if (k >= sol.size()) throw ParameterError("state index out of range");
}

CoefficientVector tc_fock_state(const EigenSolution& sol, std::size_t k, int n_max) {
  const int lambda = sol.lambda.at(k);
  const Eigen::VectorXd& v = sol.block_vectors.at(k);
  CoefficientVector out{CoefficientBasis::Fock, sol.params.two_j, n_max + 1,
                        Eigen::VectorXd::Zero(static_cast<long>(sol.params.atomic_dim()) * (n_max + 1))};
  for (long a = 0; a < v.size(); ++a) {
    const long n = lambda - a;
    if (n > n_max) {
      if (v(a) != 0.0) throw ParameterError("n_max too small for Tavis-Cummings block " + std::to_string(lambda));
      continue;
    }
    out.values(product_index(static_cast<int>(a), static_cast<int>(n), n_max + 1)) = v(a);
  }
  return out;
}

Eigen::MatrixXd resize_bosonic(const Eigen::MatrixXd& states, int d, int nb_in, int nb_out) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<long>(d) * nb_out, states.cols());
  const int keep = std::min(nb_in, nb_out);
  for (int a = 0; a < d; ++a) {
    if (nb_out < nb_in && states.middleRows(static_cast<long>(a) * nb_in + nb_out, nb_in - nb_out).cwiseAbs().maxCoeff() != 0.0) {
      throw ParameterError("n_max smaller than the construction cutoff would drop amplitude");
    }
    out.middleRows(static_cast<long>(a) * nb_out, keep) = states.middleRows(static_cast<long>(a) * nb_in, keep);
  }
  return out;
}

}  // namespace

CoefficientVector product_state(const EigenSolution& sol, std::size_t k) {
  require_vectors(sol);
  require_index(sol, k);
  if (!sol.block_vectors.empty()) throw ParameterError("use fock_state for Tavis-Cummings solutions");
  const SectorLayout layout(sol.params, sol.basis);
  return {sol.basis.kind == BasisKind::Fock ? CoefficientBasis::Fock : CoefficientBasis::Efficient,
          sol.params.two_j, sol.basis.bosonic_dim(), layout.expand_vector(sol.coefficients.col(k))};
}

Eigen::MatrixXd product_states(const EigenSolution& sol, std::span<const std::size_t> indices) {
  require_vectors(sol);
  if (!sol.block_vectors.empty()) throw ParameterError("use fock_states for Tavis-Cummings solutions");
  Eigen::MatrixXd picked(sol.coefficients.rows(), static_cast<long>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    require_index(sol, indices[c]);
    picked.col(static_cast<long>(c)) = sol.coefficients.col(static_cast<long>(indices[c]));
  }
  if (sol.basis.sector == ParitySector::Full) return picked;
  return SectorLayout(sol.params, sol.basis).expand(picked);
}

CoefficientVector fock_state(const EigenSolution& sol, std::size_t k, int n_max) {
  require_vectors(sol);
  require_index(sol, k);
  if (!sol.block_vectors.empty()) return tc_fock_state(sol, k, n_max);
  CoefficientVector prod = product_state(sol, k);
  if (sol.basis.kind == BasisKind::Efficient) {
    return rotate_atomic_x_to_z(map_efficient_to_fock(prod, sol.params, n_max));
  }
  const int d = sol.params.atomic_dim();
  return {CoefficientBasis::Fock, sol.params.two_j, n_max + 1,
          resize_bosonic(prod.values, d, prod.bosonic_dim, n_max + 1)};
}

Eigen::MatrixXd fock_states(const EigenSolution& sol, std::span<const std::size_t> indices,
                            int n_max) {
  require_vectors(sol);
  const int d = sol.params.atomic_dim();
  if (!sol.block_vectors.empty()) {
    Eigen::MatrixXd out(static_cast<long>(d) * (n_max + 1), static_cast<long>(indices.size()));
    for (std::size_t c = 0; c < indices.size(); ++c)
      out.col(static_cast<long>(c)) = tc_fock_state(sol, indices[c], n_max).values;
    return out;
  }
  const Eigen::MatrixXd prod = product_states(sol, indices);
  if (sol.basis.kind == BasisKind::Efficient) {
    if (n_max < 3 * sol.basis.cutoff) {
      throw ParameterError("mapping cutoff n_max must be at least 3*N_max");
    }
    const Eigen::MatrixXd rotated = map_efficient_to_fock(prod, sol.params, sol.basis.cutoff, n_max);
    return rotate_atomic_x_to_z(rotated, sol.params.two_j, n_max + 1);
  }
  return resize_bosonic(prod, d, sol.basis.bosonic_dim(), n_max + 1);
}

// --- Tavis-Cummings ------------------------------------------------------------

LambdaBlock build_tavis_cummings_block(const ModelParams& params, int lambda) {
  params.validate();
  if (lambda < 0) throw ParameterError("lambda must be nonnegative");
  const int dim = std::min(lambda, params.two_j) + 1;
  const double coupling = params.gamma / std::sqrt(static_cast<double>(params.two_j));
  LambdaBlock block{lambda, Eigen::MatrixXd::Zero(dim, dim)};
  for (int a = 0; a < dim; ++a) {
    const int n = lambda - a;
    block.entries(a, a) = params.omega * n + params.omega0 * (a - params.j());
    if (a + 1 < dim) {
      // a J_+ : |n; m> -> |n-1; m+1>
      const double v = coupling * std::sqrt(static_cast<double>(n)) * ladder_up(params.two_j, a);
      block.entries(a + 1, a) = v;
      block.entries(a, a + 1) = v;
    }
  }
  return block;
}

namespace {

double block_minimum(const ModelParams& params, int lambda) {
  const LambdaBlock block = build_tavis_cummings_block(params, lambda);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block.entries, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

// Lower bound on block lambda from its diagonal minimum minus the largest
// possible row sum of couplings; eventually increasing in lambda.
double coarse_block_bound(const ModelParams& p, int lambda) {
  const double j = p.j();
  const double coupling = p.gamma / std::sqrt(static_cast<double>(p.two_j));
  const int top = std::min(lambda, p.two_j);
  const double diag = std::min(p.omega * lambda - p.omega0 * j,
                               p.omega * (lambda - top) + p.omega0 * (top - j));
  return diag - 2.0 * coupling * std::sqrt(static_cast<double>(lambda)) * (j + 0.5);
}

}  // namespace

int tavis_cummings_lambda_cover(const ModelParams& params, double epsilon) {
  params.validate();
  const double target = epsilon * params.j();
  const double coupling = params.gamma / std::sqrt(static_cast<double>(params.two_j));
  const double rising_from = std::pow(coupling * (params.j() + 0.5) / params.omega, 2.0);
  int last_below = -1;
  for (int lambda = 0;; ++lambda) {
    if (lambda > rising_from && coarse_block_bound(params, lambda) >= target) break;
    if (block_minimum(params, lambda) < target) last_below = lambda;
  }
  return std::max(last_below, 0);
}

EigenSolution tavis_cummings_spectrum(const ModelParams& params, int lambda_max, EigenJob job) {
  params.validate();
  if (lambda_max < 0) throw ParameterError("lambda_max must be nonnegative");
  struct Entry {
    double energy;
    int lambda;
    int index;
  };
  std::vector<Entry> entries;
  std::vector<Eigen::MatrixXd> block_vectors(lambda_max + 1);
  std::vector<Eigen::VectorXd> block_values(lambda_max + 1);
  for (int lambda = 0; lambda <= lambda_max; ++lambda) {
    const LambdaBlock block = build_tavis_cummings_block(params, lambda);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        block.entries, job == EigenJob::Vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalError("Tavis-Cummings block eigensolver failed");
    block_values[lambda] = eig.eigenvalues();
    if (job == EigenJob::Vectors) block_vectors[lambda] = eig.eigenvectors();
    for (long i = 0; i < block.dim(); ++i)
      entries.push_back({eig.eigenvalues()(i) / params.j(), lambda, static_cast<int>(i)});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.energy, x.lambda, x.index) < std::tie(y.energy, y.lambda, y.index);
  });

  // Smallest energy among omitted blocks.
  double omitted = std::numeric_limits<double>::infinity();
  const double coupling = params.gamma / std::sqrt(static_cast<double>(params.two_j));
  const double rising_from = std::pow(coupling * (params.j() + 0.5) / params.omega, 2.0);
  for (int lambda = lambda_max + 1;; ++lambda) {
    omitted = std::min(omitted, block_minimum(params, lambda));
    if (lambda > rising_from && coarse_block_bound(params, lambda) > omitted) break;
  }

  EigenSolution sol;
  sol.params = params;
  sol.basis = BasisSpec{BasisKind::Fock, -1, ParitySector::Full};
  sol.epsilon_T = -std::numeric_limits<double>::infinity();
  const double eps_cut = omitted / params.j();
  for (const Entry& e : entries) {
    sol.energies.push_back(e.energy);
    sol.lambda.push_back(e.lambda);
    sol.parity.push_back(e.lambda % 2 == 0 ? Parity::Even : Parity::Odd);
    const bool ok = e.energy < eps_cut;
    sol.converged.push_back(ok);
    if (ok) sol.epsilon_T = e.energy;
    if (job == EigenJob::Vectors) sol.block_vectors.push_back(block_vectors[e.lambda].col(e.index));
  }
  return sol;
}

}  // namespace dicke
