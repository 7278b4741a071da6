#include "dicke/classical.hpp"

#include "dicke/errors.hpp"
#include "dicke/parallel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace dicke {

namespace odeint = boost::numeric::odeint;

namespace {

using State4 = std::array<double, 4>;
using State8 = std::array<double, 8>;

constexpr double kEdgeGap = 1e-12;

double atomic_s(double u) { return std::sqrt(1.0 - 0.25 * u); }

void require_in_disk(const PhaseSpacePoint& x) {
  const double u = x.atomic_radius2();
  if (!(u <= 4.0) || !std::isfinite(x.q) || !std::isfinite(x.p)) {
    throw ParameterError("phase-space point outside the domain Q^2 + P^2 <= 4");
  }
}

void require_off_edge(double u) {
  if (!(4.0 - u >= kEdgeGap)) {
    throw SingularityError("trajectory reached the edge of the atomic disk (Q^2 + P^2 = " +
                           std::to_string(u) + ")");
  }
}

void eom(const ModelParams& p, const State4& x, State4& dx) {
  const double q = x[0], Q = x[2], P = x[3];
  const double u = Q * Q + P * P;
  require_off_edge(u);
  const double s = atomic_s(u);
  const double g = p.gamma;
  dx[0] = p.omega * x[1];
  dx[1] = -p.omega * q - 2.0 * g * Q * s;
  dx[2] = p.omega0 * P - g * q * Q * P / (2.0 * s);
  dx[3] = -p.omega0 * Q - 2.0 * g * q * (s - Q * Q / (4.0 * s));
}

// Minimum of h over (q, p) at fixed (Q, P).
double conditional_minimum(const ModelParams& p, double Q, double P) {
  const double u = Q * Q + P * P;
  return 0.5 * p.omega0 * u - p.omega0 - 2.0 * p.gamma * p.gamma * Q * Q * (1.0 - 0.25 * u) / p.omega;
}

// Interval of u in [0, 4] where (c/4)u^2 + (omega0/2 - c)u - (eps + omega0) <= 0.
std::pair<double, double> allowed_u(double c, double omega0, double eps) {
  const double a = 0.25 * c;
  const double b = 0.5 * omega0 - c;
  const double k = -(eps + omega0);
  double lo, hi;
  if (a == 0.0) {
    if (b > 0.0) {
      lo = -std::numeric_limits<double>::infinity();
      hi = -k / b;
    } else if (b < 0.0) {
      lo = -k / b;
      hi = std::numeric_limits<double>::infinity();
    } else {
      return k <= 0.0 ? std::pair{0.0, 4.0} : std::pair{0.0, 0.0};
    }
  } else {
    const double disc = b * b - 4.0 * a * k;
    if (disc < 0.0) return {0.0, 0.0};
    const double root = std::sqrt(disc);
    const double t = -0.5 * (b + std::copysign(root, b));
    const double r1 = t / a;
    const double r2 = t != 0.0 ? k / t : 0.0;
    lo = std::min(r1, r2);
    hi = std::max(r1, r2);
  }
  lo = std::clamp(lo, 0.0, 4.0);
  hi = std::clamp(hi, 0.0, 4.0);
  return {lo, std::max(lo, hi)};
}

template <typename F>
double quarter_theta_integral(F&& f) {
  using boost::math::quadrature::gauss_kronrod;
  double error = 0.0;
  const double half_pi = 0.5 * std::numbers::pi;
  return 4.0 * gauss_kronrod<double, 61>::integrate(f, 0.0, half_pi, 15, 1e-12, &error);
}

// Accepted-step driver. on_step gets (t_prev, x_prev, t, x, clipped) after
// every accepted step and may modify x; steps are clipped to land on multiples
// of sample_dt. A trial stage that leaves the disk counts as a rejected step,
// so only a trajectory that really runs into the edge ends in an error.
template <typename State, typename System, typename OnStep>
void drive(System&& system, State x, double t_final, double tol, double sample_dt,
           OnStep&& on_step) {
  auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(tol, tol);
  const double sign = t_final >= 0.0 ? 1.0 : -1.0;
  const double span = std::abs(t_final);
  double t = 0.0;
  double dt = sign * std::min(0.01, span > 0 ? span : 0.01);
  long sample_index = 1;
  long failures = 0;
  while (sign * (t_final - t) > 0.0) {
    double target = t_final;
    if (sample_dt > 0.0) target = sign * std::min(span, sample_index * sample_dt);
    double step = dt;
    bool clipped = false;
    if (sign * (t + step - target) >= 0.0) {
      step = target - t;
      clipped = true;
    }
    const State prev = x;
    const double t_prev = t;
    bool accepted = false;
    try {
      accepted = stepper.try_step(system, x, t, step) == odeint::success;
    } catch (const SingularityError&) {
      x = prev;
      t = t_prev;
      step *= 0.25;
    }
    if (!accepted) {
      dt = step;
      if (++failures > 500 || std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t))) {
        State dx{};
        system(x, dx, t);  // rethrows the singularity if that is the cause
        throw NumericalError("integrator step size underflow at t = " + std::to_string(t));
      }
      continue;
    }
    failures = 0;
    if (clipped) {
      t = target;
      dt = sign * std::max(std::abs(dt), std::abs(step));
      ++sample_index;
    } else {
      dt = step;
    }
    on_step(t_prev, prev, t, x, clipped);
  }
}

}  // namespace

// --- Hamiltonian ---------------------------------------------------------------

double classical_hamiltonian(const PhaseSpacePoint& x, const ModelParams& params) {
  require_in_disk(x);
  const double u = x.atomic_radius2();
  return 0.5 * params.omega * (x.q * x.q + x.p * x.p) + 0.5 * params.omega0 * u - params.omega0 +
         2.0 * params.gamma * x.q * x.Q * atomic_s(u);
}

std::array<double, 4> equations_of_motion(const PhaseSpacePoint& x, const ModelParams& params) {
  require_in_disk(x);
  State4 dx{};
  eom(params, x.array(), dx);
  return dx;
}

Eigen::Matrix4d flow_jacobian(const PhaseSpacePoint& x, const ModelParams& params) {
  require_in_disk(x);
  const double q = x.q, Q = x.Q, P = x.P;
  const double u = x.atomic_radius2();
  require_off_edge(u);
  const double s = atomic_s(u);
  const double s3 = s * s * s;
  const double g = params.gamma;
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 1) = params.omega;
  m(1, 0) = -params.omega;
  m(1, 2) = -2.0 * g * (s - Q * Q / (4.0 * s));
  m(1, 3) = g * Q * P / (2.0 * s);
  m(2, 0) = -g * Q * P / (2.0 * s);
  m(2, 2) = -g * q * P / (2.0 * s) - g * q * Q * Q * P / (8.0 * s3);
  m(2, 3) = params.omega0 - g * q * Q / (2.0 * s) - g * q * Q * P * P / (8.0 * s3);
  m(3, 0) = -2.0 * g * (s - Q * Q / (4.0 * s));
  m(3, 2) = -params.omega0 + 2.0 * g * q * (3.0 * Q / (4.0 * s) + Q * Q * Q / (16.0 * s3));
  m(3, 3) = 2.0 * g * q * (P / (4.0 * s) + Q * Q * P / (16.0 * s3));
  return m;
}

double classical_ground_energy(const ModelParams& params) {
  return classical_hamiltonian(classical_ground_state(params), params);
}

PhaseSpacePoint classical_ground_state(const ModelParams& params) {
  params.validate();
  auto f = [&](double Q) { return conditional_minimum(params, Q, 0.0); };
  const auto [Q, value] =
      boost::math::tools::brent_find_minima(f, 0.0, 2.0, std::numeric_limits<double>::digits);
  (void)value;
  const double s = atomic_s(Q * Q);
  return {-2.0 * params.gamma * Q * s / params.omega, 0.0, Q, 0.0};
}

// --- trajectories ----------------------------------------------------------------

Trajectory integrate(const PhaseSpacePoint& x0, double t_final, const ModelParams& params,
                     double tol, double sample_dt) {
  params.validate();
  require_in_disk(x0);
  const double e0 = classical_hamiltonian(x0, params);
  Trajectory traj;
  traj.samples.push_back(x0);
  traj.times.push_back(0.0);
  try {
    auto system = [&](const State4& s, State4& ds, double) { eom(params, s, ds); };
    drive(system, x0.array(), t_final, tol, sample_dt,
          [&](double, const State4&, double t, State4& x, bool clipped) {
            const PhaseSpacePoint pt = PhaseSpacePoint::from(x);
            traj.energy_drift =
                std::max(traj.energy_drift, std::abs(classical_hamiltonian(pt, params) - e0));
            if (clipped) {
              traj.samples.push_back(pt);
              traj.times.push_back(t);
            }
          });
  } catch (const odeint::odeint_error& e) {
    throw NumericalError(std::string("integration failed: ") + e.what());
  }
  return traj;
}

double lyapunov_exponent(const PhaseSpacePoint& x0, const ModelParams& params, double t_final,
                         const LyapunovOptions& options) {
  params.validate();
  require_in_disk(x0);
  if (!(t_final > 0.0) || !(options.renormalize_dt > 0.0)) {
    throw ParameterError("Lyapunov run needs positive t_final and renormalization interval");
  }
  auto system = [&](const State8& s, State8& ds, double) {
    State4 x{s[0], s[1], s[2], s[3]};
    State4 dx{};
    eom(params, x, dx);
    const Eigen::Matrix4d jac = flow_jacobian(PhaseSpacePoint::from(x), params);
    const Eigen::Vector4d v(s[4], s[5], s[6], s[7]);
    const Eigen::Vector4d dv = jac * v;
    for (int i = 0; i < 4; ++i) {
      ds[i] = dx[i];
      ds[4 + i] = dv(i);
    }
  };
  const State8 s0{x0.q, x0.p, x0.Q, x0.P, 0.5, 0.5, 0.5, 0.5};
  const long intervals = std::max(2L, std::lround(t_final / options.renormalize_dt));
  const long first_counted = intervals / 2;
  long k = 0;
  double log_sum = 0.0;
  try {
    drive(system, s0, intervals * options.renormalize_dt, options.tol, options.renormalize_dt,
          [&](double, const State8&, double, State8& s, bool clipped) {
            if (!clipped) return;
            double norm = 0.0;
            for (int i = 4; i < 8; ++i) norm += s[i] * s[i];
            norm = std::sqrt(norm);
            if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("tangent vector degenerated");
            for (int i = 4; i < 8; ++i) s[i] /= norm;
            if (k++ >= first_counted) log_sum += std::log(norm);
          });
  } catch (const odeint::odeint_error& e) {
    throw NumericalError(std::string("tangent integration failed: ") + e.what());
  }
  return std::max(0.0, log_sum / ((intervals - first_counted) * options.renormalize_dt));
}

// --- shell sampling ----------------------------------------------------------------

namespace {

PhaseSpacePoint draw_shell_point(double epsilon, const ModelParams& params, double e_gs,
                                 std::mt19937_64& rng, long index) {
  if (epsilon - e_gs <= 1e-12) {
    PhaseSpacePoint x = classical_ground_state(params);
    if (index % 2 == 1) {
      x.q = -x.q;
      x.Q = -x.Q;
    }
    return x;
  }
  std::uniform_real_distribution<double> square(-2.0, 2.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (long attempt = 0; attempt < 100'000'000L; ++attempt) {
    const double Q = square(rng);
    const double P = square(rng);
    const double u = Q * Q + P * P;
    if (u >= 4.0 - kEdgeGap) continue;
    const double h_min = conditional_minimum(params, Q, P);
    if (h_min > epsilon) continue;
    // For fixed (Q, P) the shell is a circle in (q, p) around (q*, 0).
    const double radius = std::sqrt(2.0 * (epsilon - h_min) / params.omega);
    const double phi = angle(rng);
    const double q_star = -2.0 * params.gamma * Q * atomic_s(u) / params.omega;
    return {q_star + radius * std::cos(phi), radius * std::sin(phi), Q, P};
  }
  throw NumericalError("energy shell sampling did not find an allowed point");
}

std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t cell, std::uint64_t sample) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(cell >> 32),
                    static_cast<std::uint32_t>(sample), static_cast<std::uint32_t>(sample >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<PhaseSpacePoint> sample_energy_shell(double epsilon, const ModelParams& params,
                                                 int count, std::uint64_t seed) {
  params.validate();
  if (count < 0) throw ParameterError("sample count must be nonnegative");
  const double e_gs = classical_ground_energy(params);
  if (epsilon < e_gs - 1e-12) {
    throw ParameterError("energy shell is empty: epsilon = " + std::to_string(epsilon) +
                         " lies below the ground energy " + std::to_string(e_gs));
  }
  std::mt19937_64 rng = sample_engine(seed, 0, 0);
  std::vector<PhaseSpacePoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(draw_shell_point(epsilon, params, e_gs, rng, i));
  return out;
}

ChaosMap chaos_fraction_map(const std::vector<double>& epsilon_grid,
                            const std::vector<double>& gamma_grid, const ModelParams& base,
                            const ChaosMapOptions& options) {
  if (epsilon_grid.empty() || gamma_grid.empty()) throw ParameterError("chaos map grids must be nonempty");
  if (options.samples_per_cell < 1) throw ParameterError("samples_per_cell must be at least 1");
  ChaosMap map{epsilon_grid, gamma_grid,
               Eigen::MatrixXd::Zero(static_cast<long>(gamma_grid.size()), static_cast<long>(epsilon_grid.size())),
               options.samples_per_cell, options.lambda_cut, options.seed, options.t_final};
  const std::size_t n_eps = epsilon_grid.size();
  const std::size_t cells = gamma_grid.size() * n_eps;
  const std::size_t per = static_cast<std::size_t>(options.samples_per_cell);
  std::vector<double> e_gs(gamma_grid.size());
  std::vector<ModelParams> params(gamma_grid.size());
  for (std::size_t g = 0; g < gamma_grid.size(); ++g) {
    params[g] = base;
    params[g].gamma = gamma_grid[g];
    params[g].validate();
    e_gs[g] = classical_ground_energy(params[g]);
  }
  std::vector<char> chaotic(cells * per, 0);
  parallel_for(
      cells * per,
      [&](std::size_t job) {
        const std::size_t cell = job / per;
        const std::size_t sample = job % per;
        const std::size_t g = cell / n_eps;
        const double eps = epsilon_grid[cell % n_eps];
        if (eps < e_gs[g]) return;
        std::mt19937_64 rng = sample_engine(options.seed, cell, sample);
        for (int attempt = 0;; ++attempt) {
          const PhaseSpacePoint x0 =
              draw_shell_point(eps, params[g], e_gs[g], rng, static_cast<long>(sample));
          try {
            const double lambda =
                lyapunov_exponent(x0, params[g], options.t_final, options.lyapunov);
            chaotic[job] = lambda > options.lambda_cut * base.omega ? 1 : 0;
            return;
          } catch (const SingularityError&) {
            if (attempt >= 10) throw;
          }
        }
      },
      options.threads);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const long g = static_cast<long>(cell / n_eps);
    const long e = static_cast<long>(cell % n_eps);
    if (epsilon_grid[e] < e_gs[g]) {
      map.fraction(g, e) = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    long hits = 0;
    for (std::size_t s = 0; s < per; ++s) hits += chaotic[cell * per + s];
    map.fraction(g, e) = static_cast<double>(hits) / static_cast<double>(per);
  }
  return map;
}

// --- Poincare sections ---------------------------------------------------------------

std::vector<SectionPoint> poincare_section(const PhaseSpacePoint& x0, const ModelParams& params,
                                           double t_final, const SectionPlane& plane, double tol) {
  params.validate();
  require_in_disk(x0);
  for (int c : {plane.coordinate, plane.first, plane.second}) {
    if (c < 0 || c > 3) throw ParameterError("section coordinates index (q, p, Q, P)");
  }
  if (plane.direction != 1 && plane.direction != -1) throw ParameterError("section direction must be +1 or -1");
  if (!(t_final > 0.0)) throw ParameterError("section run needs t_final > 0");
  auto system = [&](const State4& s, State4& ds, double) { eom(params, s, ds); };
  odeint::runge_kutta_fehlberg78<State4> single;
  std::vector<SectionPoint> out;
  const int c = plane.coordinate;
  const double dir = plane.direction;
  try {
    drive(system, x0.array(), t_final, tol, 0.0,
          [&](double t0, const State4& a, double t1, State4& b, bool) {
            const double ga = dir * (a[c] - plane.value);
            const double gb = dir * (b[c] - plane.value);
            if (!(ga < 0.0 && gb >= 0.0)) return;
            auto at = [&](double tau) {
              State4 y{};
              if (tau == 0.0) return a;
              single.do_step(system, a, t0, y, tau);
              return y;
            };
            auto g = [&](double tau) { return dir * (at(tau)[c] - plane.value); };
            std::uintmax_t iterations = 100;
            auto close = [](double lo, double hi) { return std::abs(hi - lo) < 1e-12; };
            const auto [lo, hi] = boost::math::tools::toms748_solve(g, 0.0, t1 - t0, ga, gb, close, iterations);
            const double tau = 0.5 * (lo + hi);
            const State4 y = at(tau);
            out.push_back({t0 + tau, y[plane.first], y[plane.second]});
          });
  } catch (const odeint::odeint_error& e) {
    throw NumericalError(std::string("integration failed: ") + e.what());
  }
  return out;
}

// --- density of states ------------------------------------------------------------

double shell_area(double epsilon, const ModelParams& params) {
  params.validate();
  const double w2 = 2.0 * params.gamma * params.gamma / params.omega;
  return quarter_theta_integral([&](double theta) {
    const double cth = std::cos(theta);
    const auto [lo, hi] = allowed_u(w2 * cth * cth, params.omega0, epsilon);
    return 0.5 * (hi - lo);
  });
}

double semiclassical_dos(double epsilon, const ModelParams& params) {
  const double j = params.j();
  return j * j * shell_area(epsilon, params) / (2.0 * std::numbers::pi * params.omega);
}

double semiclassical_state_count(double epsilon, const ModelParams& params) {
  params.validate();
  const double w2 = 2.0 * params.gamma * params.gamma / params.omega;
  const double omega0 = params.omega0;
  // Integral over u of (epsilon - h_min) on the allowed interval, in closed form.
  const double volume = quarter_theta_integral([&](double theta) {
    const double cth = std::cos(theta);
    const double c = w2 * cth * cth;
    const auto [lo, hi] = allowed_u(c, omega0, epsilon);
    auto primitive = [&](double u) {
      return (epsilon + omega0) * u - 0.5 * (0.5 * omega0 - c) * u * u - c * u * u * u / 12.0;
    };
    return 0.5 * (primitive(hi) - primitive(lo));
  });
  const double j = params.j();
  return j * j * volume / (2.0 * std::numbers::pi * params.omega);
}

}  // namespace dicke
