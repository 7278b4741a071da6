#include "dicke/basis_map.hpp"
#include "dicke/entropy.hpp"
#include "dicke/errors.hpp"
#include "dicke/eth.hpp"
#include "dicke/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace dicke;

namespace {

CoefficientVector random_state(int two_j, int n_max, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CoefficientVector c{CoefficientBasis::Fock, two_j, n_max + 1, Eigen::VectorXd((two_j + 1) * (n_max + 1))};
  for (long i = 0; i < c.values.size(); ++i) c.values(i) = g(rng) * std::exp(-0.1 * (i % (n_max + 1)));
  c.values.normalize();
  return c;
}

std::vector<double> nonzero_spectrum(const Eigen::MatrixXd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (long i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > 1e-13) out.push_back(es.eigenvalues()(i));
  std::sort(out.begin(), out.end());
  return out;
}

EigenSolution converged_solution(const ModelParams& p, const BasisSpec& basis) {
  const EigenSolution sol = diagonalize(build_hamiltonian(p, basis));
  BasisSpec big = basis;
  big.cutoff = enlarged_cutoff(basis.cutoff);
  return filter_converged(sol, diagonalize(build_hamiltonian(p, big), EigenJob::ValuesOnly), 1e-8, 1e-6);
}

}  // namespace

TEST(Reduction, ProductStateIsPure) {
  const int two_j = 4, n_max = 6;
  CoefficientVector c{CoefficientBasis::Fock, two_j, n_max + 1, Eigen::VectorXd::Zero(5 * 7)};
  c.values(product_index(3, 2, n_max + 1)) = 1.0;
  const Eigen::MatrixXd rho = reduce_to_atomic(c);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(5, 5);
  expected(3, 3) = 1.0;
  EXPECT_EQ(rho, expected);
  EXPECT_EQ(von_neumann_entropy(rho), 0.0);
}

TEST(Reduction, SchmidtForm) {
  const int two_j = 3, n_max = 4;
  CoefficientVector c{CoefficientBasis::Fock, two_j, n_max + 1, Eigen::VectorXd::Zero(4 * 5)};
  c.values(product_index(two_j, 0, n_max + 1)) = std::sqrt(0.5);
  c.values(product_index(0, 1, n_max + 1)) = std::sqrt(0.5);
  const Eigen::MatrixXd rho = reduce_to_atomic(c);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(4);
  diag(0) = diag(3) = 0.5;
  EXPECT_LT((rho - Eigen::MatrixXd(diag.asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(von_neumann_entropy(rho), std::log(2.0), 1e-15);
}

TEST(Reduction, EitherSubsystemGivesTheSameEntropy) {
  for (int two_j = 1; two_j <= 6; ++two_j) {
    const CoefficientVector c = random_state(two_j, 30, 100 + two_j);
    const Eigen::MatrixXd atoms = reduce_to_atomic(c);
    const Eigen::MatrixXd field = reduce_to_bosonic(c);
    const auto sa = nonzero_spectrum(atoms), sf = nonzero_spectrum(field);
    ASSERT_EQ(sa.size(), sf.size());
    for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_NEAR(sa[i], sf[i], 1e-12);
    EXPECT_NEAR(von_neumann_entropy(atoms), von_neumann_entropy(field), 1e-10);
    EXPECT_LE(von_neumann_entropy(atoms), std::log(two_j + 1.0) + 1e-12);
  }
}

TEST(Reduction, LocalRotationLeavesEntanglementUnchanged) {
  for (int two_j = 1; two_j <= 6; ++two_j) {
    const CoefficientVector c = random_state(two_j, 20, 7 * two_j);
    CoefficientVector as_x = c;
    as_x.basis = CoefficientBasis::FockRotated;
    const CoefficientVector rotated = rotate_atomic_x_to_z(as_x);
    EXPECT_NEAR(von_neumann_entropy(reduce_to_atomic(c)), von_neumann_entropy(reduce_to_atomic(rotated)), 1e-12);
    EXPECT_GT(std::abs(shannon_entropy(c) - shannon_entropy(rotated)), 1e-6);
  }
}

TEST(Reduction, ErrorsAndNormalization) {
  CoefficientVector c = random_state(2, 10, 1);
  c.values *= std::sqrt(1.0 - 1e-7);
  EXPECT_NEAR(reduce_to_atomic(c).trace(), 1.0, 1e-14);
  c.values *= std::sqrt(1.0 - 1e-4);
  EXPECT_THROW(reduce_to_atomic(c), TruncationError);
  c.basis = CoefficientBasis::Efficient;
  EXPECT_THROW(reduce_to_atomic(c), ParameterError);
  EXPECT_THROW(von_neumann_entropy(Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3))), NormalizationError);
  EXPECT_NEAR(von_neumann_entropy(Eigen::MatrixXd(Eigen::MatrixXd::Identity(5, 5) / 5.0)), std::log(5.0), 1e-14);
}

TEST(Entropy, SpectrumOfConvexCombination) {
  const std::vector<double> p{0.5, 0.2, 0.2, 0.1, 0.0};
  double direct = 0.0;
  for (double x : p)
    if (x > 0) direct -= x * std::log(x);
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(p.data(), 5);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(5, 5)).householderQ();
  const Eigen::MatrixXd rho = q * d.asDiagonal() * q.transpose();
  EXPECT_NEAR(spectrum_entropy(p), direct, 1e-15);
  EXPECT_NEAR(von_neumann_entropy(rho), direct, 1e-12);
}

TEST(Entropy, ShannonBasics) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(9);
  e(4) = -1.0;
  EXPECT_EQ(shannon_entropy(e), 0.0);
  EXPECT_NEAR(shannon_entropy(Eigen::VectorXd(Eigen::VectorXd::Constant(9, 1.0 / 3.0))), std::log(9.0), 1e-14);
  const CoefficientVector c = random_state(3, 12, 9);
  Eigen::VectorXd shuffled = c.values;
  std::mt19937 rng(4);
  std::shuffle(shuffled.data(), shuffled.data() + shuffled.size(), rng);
  EXPECT_NEAR(shannon_entropy(c), shannon_entropy(shuffled), 1e-13);
}

TEST(Entropy, CoherentStateIsUnentangled) {
  const ModelParams p = ModelParams::make(1.0, 1.0, 0.5, 3.0);
  const Eigen::VectorXcd psi = glauber_bloch_state({0.4, -0.3, 0.8, 0.9}, p, 40);
  const Eigen::MatrixXcd rho = reduce_to_atomic(psi, p.two_j);
  EXPECT_NEAR(std::abs((rho * rho).trace() - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(von_neumann_entropy(rho), 0.0, 1e-10);
  const Eigen::VectorXcd cat = parity_projection(psi, p.two_j, Parity::Even);
  EXPECT_GT(von_neumann_entropy(reduce_to_atomic(cat, p.two_j)), 0.1);
}

TEST(EntropyLattice, ZeroCouplingGivesProductStates) {
  const ModelParams p = ModelParams::make(1.0, 0.7, 0.0, 3.0);
  EigenSolution sol = diagonalize(build_fock_hamiltonian(p, 10, ParitySector::Even));
  sol.converged.assign(sol.size(), true);
  const auto rec = entropy_lattice(sol, {EntropyKind::Entanglement, EntropyKind::ShannonFock});
  ASSERT_EQ(rec.size(), sol.size());
  for (const auto& r : rec) {
    EXPECT_EQ(r.S_En, 0.0);
    EXPECT_EQ(r.S_Sh_fock, 0.0);
    EXPECT_TRUE(std::isnan(r.S_Sh_eff));
    EXPECT_DOUBLE_EQ(r.entanglement_scaled(), 1.0 / 7.0);
  }
  EXPECT_THROW(entropy_lattice(sol, {EntropyKind::ShannonEfficient}), ParameterError);
}

TEST(EntropyLattice, BasisIndependentQuantities) {
  const ModelParams p = ModelParams::make(1.0, 1.0, 0.8, 2.0);
  const EigenSolution eff = converged_solution(p, {BasisKind::Efficient, 40, ParitySector::Odd});
  const EigenSolution fock = converged_solution(p, {BasisKind::Fock, 100, ParitySector::Odd});
  std::vector<std::size_t> idx(25);
  std::iota(idx.begin(), idx.end(), 0);
  const auto a = entropy_lattice(eff, {EntropyKind::Entanglement, EntropyKind::ShannonFock,
                                       EntropyKind::ShannonEfficient}, idx);
  const auto b = entropy_lattice(fock, {EntropyKind::Entanglement, EntropyKind::ShannonFock}, idx);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    EXPECT_NEAR(a[k].S_En, b[k].S_En, 1e-6) << k;
    EXPECT_NEAR(a[k].S_Sh_fock, b[k].S_Sh_fock, 1e-6) << k;
    EXPECT_GE(a[k].S_En, 0.0);
    EXPECT_LE(a[k].S_En, std::log(5.0));
    EXPECT_GE(a[k].S_Sh_eff, 0.0);
    EXPECT_EQ(a[k].parity, Parity::Odd);
  }
  EXPECT_THROW(entropy_lattice(eff, {EntropyKind::Entanglement}, std::vector<std::size_t>{eff.size() - 1}),
               ConvergenceError);
}

TEST(EntropyLattice, ThreadCountDoesNotChangeResults) {
  const ModelParams p = ModelParams::make(1.0, 1.0, 1.0, 3.0);
  EigenSolution sol = diagonalize(build_efficient_hamiltonian(p, 30, ParitySector::Even));
  sol.converged.assign(sol.size(), true);
  const std::set<EntropyKind> all{EntropyKind::Entanglement, EntropyKind::ShannonFock, EntropyKind::ShannonEfficient};
  const auto a = entropy_lattice(sol, all, {}, 1);
  const auto b = entropy_lattice(sol, all, {}, 3);
  ASSERT_EQ(a.size(), b.size());
  ASSERT_GT(a.size(), 64u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].S_En, b[k].S_En);
    EXPECT_EQ(a[k].S_Sh_fock, b[k].S_Sh_fock);
    EXPECT_EQ(a[k].S_Sh_eff, b[k].S_Sh_eff);
  }
}

TEST(EntropyLattice, TavisCummings) {
  const ModelParams p = ModelParams::make(1.0, 1.0, 0.7, 2.0);
  const EigenSolution tc = tavis_cummings_spectrum(p, 15);
  const auto rec = entropy_lattice(tc, {EntropyKind::Entanglement});
  ASSERT_FALSE(rec.empty());
  // lambda = 0 is the product state |0> (x) |j, -j>.
  for (const auto& r : rec)
    if (tc.lambda[r.state] == 0) EXPECT_NEAR(r.S_En, 0.0, 1e-14);
  for (const auto& r : rec) EXPECT_LE(r.S_En, std::log(5.0) + 1e-12);
}
