#include "dicke/classical.hpp"
#include "dicke/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace dicke;

namespace {

const ModelParams kChaotic = ModelParams::make(1.0, 1.0, 1.0, 30.0);

// h_F + h_A + h_I written out separately.
double reference_energy(const PhaseSpacePoint& x, const ModelParams& p) {
  const double field = p.omega * (x.q * x.q + x.p * x.p) / 2.0;
  const double r2 = x.Q * x.Q + x.P * x.P;
  const double atom = p.omega0 * (r2 / 2.0 - 1.0);
  const double jx = x.Q * std::sqrt(1.0 - r2 / 4.0);
  return field + atom + 2.0 * p.gamma * x.q * jx;
}

PhaseSpacePoint random_point(std::mt19937_64& rng, double max_r = 1.9) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> r(0.0, max_r);
  std::uniform_real_distribution<double> a(0.0, 2.0 * std::numbers::pi);
  const double rad = r(rng);
  const double th = a(rng);
  return {2.0 * u(rng), 2.0 * u(rng), rad * std::cos(th), rad * std::sin(th)};
}

double superradiant_ground(double omega, double omega0, double gamma) {
  const double gc2 = omega * omega0 / 4.0;
  if (gamma * gamma <= gc2) return -omega0;
  return -0.5 * omega0 * (gamma * gamma / gc2 + gc2 / (gamma * gamma));
}

}  // namespace

TEST(ClassicalHamiltonian, ValuesAndDomain) {
  EXPECT_DOUBLE_EQ(classical_hamiltonian({0, 0, 0, 0}, kChaotic), -1.0);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const PhaseSpacePoint x = random_point(rng, 2.0);
    EXPECT_NEAR(classical_hamiltonian(x, kChaotic), reference_energy(x, kChaotic), 1e-13);
  }
  EXPECT_THROW(classical_hamiltonian({0, 0, 1.5, 1.5}, kChaotic), ParameterError);
}

TEST(ClassicalHamiltonian, GroundEnergy) {
  EXPECT_NEAR(classical_ground_energy(kChaotic), -2.125, 1e-10);
  for (double gamma : {0.0, 0.2, 0.5, 0.51, 0.8, 1.7, 3.0}) {
    for (auto [w, w0] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}, std::pair{2.0, 0.3}}) {
      const ModelParams p{w, w0, gamma, 10};
      EXPECT_NEAR(classical_ground_energy(p), superradiant_ground(w, w0, gamma), 1e-10)
          << gamma << " " << w << " " << w0;
    }
  }
  const PhaseSpacePoint gs = classical_ground_state(kChaotic);
  for (double e : equations_of_motion(gs, kChaotic)) EXPECT_NEAR(e, 0.0, 1e-7);
}

TEST(EquationsOfMotion, MatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-6;
  for (int i = 0; i < 300; ++i) {
    const PhaseSpacePoint x = random_point(rng);
    const auto f = equations_of_motion(x, kChaotic);
    std::array<double, 4> grad{};
    for (int c = 0; c < 4; ++c) {
      auto plus = x.array();
      auto minus = x.array();
      plus[c] += h;
      minus[c] -= h;
      grad[c] = (classical_hamiltonian(PhaseSpacePoint::from(plus), kChaotic) -
                 classical_hamiltonian(PhaseSpacePoint::from(minus), kChaotic)) /
                (2 * h);
    }
    EXPECT_NEAR(f[0], grad[1], 1e-6);
    EXPECT_NEAR(f[1], -grad[0], 1e-6);
    EXPECT_NEAR(f[2], grad[3], 1e-6);
    EXPECT_NEAR(f[3], -grad[2], 1e-6);
  }
}

TEST(EquationsOfMotion, DecoupledAndEdge) {
  const ModelParams free{1.3, 0.7, 0.0, 4};
  const auto f = equations_of_motion({0.4, -0.2, 0.9, 0.3}, free);
  EXPECT_DOUBLE_EQ(f[0], 1.3 * -0.2);
  EXPECT_DOUBLE_EQ(f[1], -1.3 * 0.4);
  EXPECT_DOUBLE_EQ(f[2], 0.7 * 0.3);
  EXPECT_DOUBLE_EQ(f[3], -0.7 * 0.9);
  for (double e : equations_of_motion({0, 0, 0, 0}, kChaotic)) EXPECT_EQ(e, 0.0);
  EXPECT_THROW(equations_of_motion({0, 0, 2.0, 0}, kChaotic), SingularityError);
}

TEST(EquationsOfMotion, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  const double h = 1e-6;
  for (int i = 0; i < 100; ++i) {
    const PhaseSpacePoint x = random_point(rng);
    const Eigen::Matrix4d jac = flow_jacobian(x, kChaotic);
    for (int c = 0; c < 4; ++c) {
      auto plus = x.array();
      auto minus = x.array();
      plus[c] += h;
      minus[c] -= h;
      const auto fp = equations_of_motion(PhaseSpacePoint::from(plus), kChaotic);
      const auto fm = equations_of_motion(PhaseSpacePoint::from(minus), kChaotic);
      for (int r = 0; r < 4; ++r) EXPECT_NEAR(jac(r, c), (fp[r] - fm[r]) / (2 * h), 1e-5);
    }
  }
}

TEST(Integrate, HarmonicLimit) {
  const ModelParams free{1.0, 1.0, 0.0, 2};
  const Trajectory t = integrate({1, 0, 0, 0}, 50.0, free, kIntegratorTolerance, 0.5);
  ASSERT_EQ(t.samples.size(), 101u);
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    EXPECT_NEAR(t.samples[k].q, std::cos(t.times[k]), 1e-8);
    EXPECT_NEAR(t.samples[k].p, -std::sin(t.times[k]), 1e-8);
  }
  EXPECT_DOUBLE_EQ(t.times.back(), 50.0);
}

TEST(Integrate, ConservesEnergyAndReverses) {
  const auto x0 = sample_energy_shell(-0.5, kChaotic, 1, 21).front();
  const Trajectory fwd = integrate(x0, 1e4, kChaotic, kIntegratorTolerance, 100.0);
  EXPECT_LT(fwd.energy_drift, 1e-8);

  const Trajectory there = integrate(x0, 20.0, kChaotic);
  const Trajectory back = integrate(there.samples.back(), -20.0, kChaotic);
  const auto a = x0.array();
  const auto b = back.samples.back().array();
  for (int c = 0; c < 4; ++c) EXPECT_NEAR(a[c], b[c], 1e-6);
}

TEST(Lyapunov, RegularAndChaotic) {
  const ModelParams free{1.0, 1.0, 0.0, 2};
  EXPECT_LT(lyapunov_exponent({0.8, 0.1, 0.5, -0.4}, free, 1000), 1e-3);

  const auto pts = sample_energy_shell(0.75, kChaotic, 20, 4);
  int positive = 0;
  for (const auto& x : pts) positive += lyapunov_exponent(x, kChaotic, 1000) > 0.05;
  EXPECT_GE(positive, 19);

  const double l1 = lyapunov_exponent(pts[0], kChaotic, 2000);
  const double l2 = lyapunov_exponent(pts[0], kChaotic, 4000);
  EXPECT_NEAR(l2, l1, 0.1 * l1);
}

TEST(ShellSampling, ExactDeterministicAndBounded) {
  const auto a = sample_energy_shell(0.3, kChaotic, 500, 99);
  const auto b = sample_energy_shell(0.3, kChaotic, 500, 99);
  const auto c = sample_energy_shell(0.3, kChaotic, 500, 100);
  ASSERT_EQ(a.size(), 500u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(classical_hamiltonian(a[i], kChaotic), 0.3, 1e-12);
    EXPECT_LE(a[i].atomic_radius2(), 4.0);
    EXPECT_EQ(a[i].array(), b[i].array());
  }
  EXPECT_NE(a[0].array(), c[0].array());
  EXPECT_THROW(sample_energy_shell(-2.2, kChaotic, 3, 1), ParameterError);
}

TEST(ShellSampling, NearGroundClustersAtMinima) {
  const PhaseSpacePoint gs = classical_ground_state(kChaotic);
  const auto pts = sample_energy_shell(-2.125 + 1e-5, kChaotic, 50, 3);
  for (const auto& x : pts) {
    const double d_plus = std::hypot(std::hypot(x.q - gs.q, x.p), std::hypot(x.Q - gs.Q, x.P));
    const double d_minus = std::hypot(std::hypot(x.q + gs.q, x.p), std::hypot(x.Q + gs.Q, x.P));
    EXPECT_LT(std::min(d_plus, d_minus), 0.05);
  }
  const auto exact = sample_energy_shell(classical_ground_energy(kChaotic), kChaotic, 2, 3);
  EXPECT_DOUBLE_EQ(exact[0].Q, -exact[1].Q);
}

TEST(ChaosMap, FractionsAndDeterminism) {
  ChaosMapOptions opt;
  opt.samples_per_cell = 6;
  opt.t_final = 400;
  opt.seed = 17;
  const std::vector<double> eps{-2.5, -0.9, 0.75};
  const std::vector<double> gam{0.0, 1.0};
  const ChaosMap m = chaos_fraction_map(eps, gam, kChaotic, opt);
  EXPECT_EQ(m.fraction.rows(), 2);
  EXPECT_TRUE(m.empty(0, 0));
  EXPECT_TRUE(m.empty(1, 0));
  EXPECT_EQ(m.fraction(0, 1), 0.0);
  EXPECT_EQ(m.fraction(0, 2), 0.0);
  EXPECT_EQ(m.fraction(1, 2), 1.0);
  opt.threads = 3;
  const ChaosMap again = chaos_fraction_map(eps, gam, kChaotic, opt);
  for (long g = 0; g < 2; ++g)
    for (long e = 1; e < 3; ++e) EXPECT_EQ(m.fraction(g, e), again.fraction(g, e));
  opt.samples_per_cell = 0;
  EXPECT_THROW(chaos_fraction_map(eps, gam, kChaotic, opt), ParameterError);
}

TEST(Poincare, PeriodicOrbitGivesOnePoint) {
  const ModelParams free{1.0, 1.0, 0.0, 2};
  // Only the field is excited: (Q, P) stays at the origin and p crosses 0
  // upward once per period 2 pi, at t = 2 pi k.
  const auto pts = poincare_section({-1.0, 0.0, 0.0, 0.0}, free, 20 * std::numbers::pi + 1.0);
  ASSERT_GE(pts.size(), 9u);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    EXPECT_NEAR(pts[k].a, 0.0, 1e-12);
    EXPECT_NEAR(pts[k].b, 0.0, 1e-12);
    const double turns = pts[k].t / (2 * std::numbers::pi);
    EXPECT_NEAR(turns, std::round(turns), 1e-9);
  }
}

TEST(Poincare, CrossingsLieOnThePlane) {
  const auto x0 = sample_energy_shell(0.75, kChaotic, 1, 8).front();
  const auto pts = poincare_section(x0, kChaotic, 300.0);
  ASSERT_GT(pts.size(), 10u);
  for (std::size_t k = 1; k < pts.size(); ++k) EXPECT_GT(pts[k].t, pts[k - 1].t);
  // Re-integrating to a recorded crossing time lands on p = 0.
  const Trajectory t = integrate(x0, pts[3].t, kChaotic, kIntegratorTolerance, 0.0);
  EXPECT_NEAR(t.samples.back().p, 0.0, 1e-8);
  EXPECT_NEAR(t.samples.back().Q, pts[3].a, 1e-8);
}

TEST(Poincare, ChaoticOrbitFillsArea) {
  const auto x0 = sample_energy_shell(0.75, kChaotic, 1, 8).front();
  auto occupancy = [&](double t_final) {
    std::set<std::pair<int, int>> cells;
    for (const auto& s : poincare_section(x0, kChaotic, t_final))
      cells.insert({static_cast<int>(std::floor(s.a * 10)), static_cast<int>(std::floor(s.b * 10))});
    return cells.size();
  };
  EXPECT_GT(occupancy(2000.0), occupancy(500.0) * 1.3);
}

TEST(Poincare, RegularOrbitLiesOnCurve) {
  // Near the superradiant minimum the motion is quasi-periodic: the section
  // points of a low-energy orbit lie on a smooth closed curve, so sorting them
  // by angle around their centroid gives a small radial jitter.
  const auto x0 = sample_energy_shell(-2.05, kChaotic, 1, 2).front();
  const auto pts = poincare_section(x0, kChaotic, 3000.0);
  ASSERT_GT(pts.size(), 100u);
  double ca = 0, cb = 0;
  for (const auto& s : pts) {
    ca += s.a;
    cb += s.b;
  }
  ca /= pts.size();
  cb /= pts.size();
  std::vector<std::pair<double, double>> polar;
  for (const auto& s : pts) polar.push_back({std::atan2(s.b - cb, s.a - ca), std::hypot(s.a - ca, s.b - cb)});
  std::sort(polar.begin(), polar.end());
  double jump = 0.0;
  double mean_r = 0.0;
  for (std::size_t k = 0; k < polar.size(); ++k) {
    mean_r += polar[k].second / polar.size();
    if (k > 0) jump = std::max(jump, std::abs(polar[k].second - polar[k - 1].second));
  }
  EXPECT_LT(jump, 0.1 * mean_r);
}

TEST(DensityOfStates, LimitsAndScaling) {
  EXPECT_EQ(shell_area(-2.2, kChaotic), 0.0);
  EXPECT_NEAR(shell_area(5.0, kChaotic), 4 * std::numbers::pi, 1e-10);
  EXPECT_NEAR(semiclassical_dos(5.0, kChaotic), 2.0 * 900.0, 1e-7);
  const ModelParams half = ModelParams::make(1.0, 1.0, 1.0, 15.0);
  for (double e : {-2.0, -1.0, 0.0, 0.8})
    EXPECT_NEAR(semiclassical_dos(e, kChaotic) / semiclassical_dos(e, half), 4.0, 1e-12);
}

TEST(DensityOfStates, NormalPhaseClosedForm) {
  // gamma = 0: A = pi * 2(eps + omega0)/omega0 on the disk, so the count is
  // (j^2 / 2 omega omega0)(eps + omega0)^2 below eps = omega0.
  const ModelParams p{1.0, 1.0, 0.0, 20};
  for (double e : {-0.7, 0.0, 0.6}) {
    EXPECT_NEAR(shell_area(e, p), 2 * std::numbers::pi * (e + 1.0), 1e-10);
    EXPECT_NEAR(semiclassical_state_count(e, p), 100.0 * 0.5 * (e + 1) * (e + 1), 1e-8);
  }
}

TEST(DensityOfStates, CountIsIntegralOfDensity) {
  // Trapezoid integral of nu against the closed-form count.
  const double a = classical_ground_energy(kChaotic);
  const double b = 0.4;
  const int n = 4000;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * semiclassical_dos(a + (b - a) * i / n, kChaotic);
  }
  sum *= (b - a) / n;
  EXPECT_NEAR(semiclassical_state_count(b, kChaotic), sum, 1e-4 * sum);
}
