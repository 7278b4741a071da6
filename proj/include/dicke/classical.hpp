#pragma once

// Classical limit of the Dicke model: h(q, p; Q, P) with the atomic pair on
// the disk Q^2 + P^2 <= 4, Lyapunov exponents, chaos maps, Poincare sections
// and the semiclassical density of states.

#include "dicke/params.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace dicke {

struct PhaseSpacePoint {
  double q = 0.0;
  double p = 0.0;
  double Q = 0.0;
  double P = 0.0;

  std::array<double, 4> array() const { return {q, p, Q, P}; }
  static PhaseSpacePoint from(const std::array<double, 4>& x) { return {x[0], x[1], x[2], x[3]}; }
  double atomic_radius2() const { return Q * Q + P * P; }
};

/// Scaled energy h = <H>/j of the Glauber-Bloch coherent state at x.
double classical_hamiltonian(const PhaseSpacePoint& x, const ModelParams& params);

/// Hamilton's equations (dq/dt, dp/dt, dQ/dt, dP/dt). Throws SingularityError
/// within 1e-12 of the disk edge.
std::array<double, 4> equations_of_motion(const PhaseSpacePoint& x, const ModelParams& params);

/// Jacobian of equations_of_motion, the generator of the tangent flow.
Eigen::Matrix4d flow_jacobian(const PhaseSpacePoint& x, const ModelParams& params);

/// Classical ground-state energy from a bounded Brent minimization over Q
/// (q and p eliminated exactly, P = 0 at the minimum).
double classical_ground_energy(const ModelParams& params);
/// The minimizer with Q >= 0; its mirror (-q, p, -Q, P) is degenerate.
PhaseSpacePoint classical_ground_state(const ModelParams& params);

struct Trajectory {
  std::vector<PhaseSpacePoint> samples;
  std::vector<double> times;
  double energy_drift = 0.0;  // max |h(x(t)) - h(x(0))| over accepted steps
};

inline constexpr double kIntegratorTolerance = 1e-13;

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration from t = 0 to t_final
/// (negative for backward integration). Samples are taken every sample_dt
/// and at t_final.
Trajectory integrate(const PhaseSpacePoint& x0, double t_final, const ModelParams& params,
                     double tol = kIntegratorTolerance, double sample_dt = 1.0);

struct LyapunovOptions {
  double renormalize_dt = 1.0;
  double tol = 1e-10;
};

/// Largest Lyapunov exponent from the tangent flow, renormalized every
/// renormalize_dt; the rate is averaged over the second half of the run.
double lyapunov_exponent(const PhaseSpacePoint& x0, const ModelParams& params, double t_final,
                         const LyapunovOptions& options = {});

/// Points with h(x) = epsilon: (Q, P) uniform on the part of the disk whose
/// minimal energy lies below epsilon, then (q, p) at a uniform angle on the
/// circle h = epsilon around the bosonic minimum for that (Q, P). At the
/// ground energy the two degenerate minima are returned alternately.
std::vector<PhaseSpacePoint> sample_energy_shell(double epsilon, const ModelParams& params,
                                                 int count, std::uint64_t seed);

struct ChaosMapOptions {
  int samples_per_cell = 200;
  double lambda_cut = 0.01;  // in units of omega
  std::uint64_t seed = 0;
  double t_final = 1000.0;
  int threads = 0;
  LyapunovOptions lyapunov;
};

struct ChaosMap {
  std::vector<double> epsilon_grid;
  std::vector<double> gamma_grid;
  /// fraction(g, e) for gamma_grid[g], epsilon_grid[e]; NaN marks cells
  /// below the ground energy.
  Eigen::MatrixXd fraction;
  int samples_per_cell = 0;
  double lambda_cut = 0.0;
  std::uint64_t seed = 0;
  double t_final = 0.0;

  bool empty(long g, long e) const { return std::isnan(fraction(g, e)); }
};

/// Per-sample random streams are keyed by (seed, cell, sample), so the map
/// does not depend on the thread count. `base` supplies omega and omega0.
ChaosMap chaos_fraction_map(const std::vector<double>& epsilon_grid,
                            const std::vector<double>& gamma_grid, const ModelParams& base,
                            const ChaosMapOptions& options);

struct SectionPlane {
  int coordinate = 1;  // index into (q, p, Q, P)
  double value = 0.0;
  int direction = 1;  // +1: crossing with increasing coordinate
  int first = 2;      // recorded pair
  int second = 3;
};

struct SectionPoint {
  double t = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Crossings of the plane, located in time to 1e-10 by root finding on
/// re-taken integrator steps.
std::vector<SectionPoint> poincare_section(const PhaseSpacePoint& x0, const ModelParams& params,
                                           double t_final, const SectionPlane& plane = {},
                                           double tol = 1e-12);

/// Area of {(Q, P) in the disk : min_{q,p} h <= epsilon}.
double shell_area(double epsilon, const ModelParams& params);

/// nu(epsilon) = j^2 A(epsilon) / (2 pi omega), the number of states per unit
/// scaled energy (both parities).
double semiclassical_dos(double epsilon, const ModelParams& params);

/// Integral of nu from the ground energy to epsilon.
double semiclassical_state_count(double epsilon, const ModelParams& params);

}  // namespace dicke
