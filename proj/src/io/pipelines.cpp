#include "dicke/io/pipelines.hpp"

#include "dicke/basis_map.hpp"
#include "dicke/classical.hpp"
#include "dicke/entropy.hpp"
#include "dicke/errors.hpp"
#include "dicke/eth.hpp"
#include "dicke/log.hpp"
#include "dicke/spectral.hpp"

#include <zlib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numeric>

#ifndef DICKE_VERSION
#define DICKE_VERSION "unversioned"
#endif

namespace dicke::io {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const char* kEps = "E/(omega j)";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json model_json(const ModelParams& p) {
  return {{"omega", p.omega}, {"omega0", p.omega0}, {"gamma", p.gamma}, {"j", p.j()}};
}

json moments_json(const MomentSummary& m) {
  return {{"count", m.count},
          {"mean", m.mean},
          {"sigma", m.sigma},
          {"skewness", m.skewness},
          {"excess_kurtosis", m.excess_kurtosis},
          {"degenerate", m.degenerate},
          {"gaussian", m.gaussian()}};
}

ParitySector single_sector(const RunConfig& c, const char* pipeline) {
  if (c.parity == ParityChoice::Both) {
    throw ConfigError(std::string("basis.parity: the ") + pipeline + " pipeline needs a single parity");
  }
  return c.sectors().front();
}

int mic_window(int configured, double j) { return configured > 0 ? configured : default_mic_window(j); }

struct Levels {
  std::vector<double> epsilon;
  std::vector<double> parity;
  std::vector<std::size_t> order;  // ascending energy
};

// Converged states of several sectors merged in energy order.
template <typename F>
void merged_order(const std::vector<EigenSolution>& sols, F&& visit) {
  struct Item {
    double e;
    std::size_t s, k;
  };
  std::vector<Item> items;
  for (std::size_t s = 0; s < sols.size(); ++s)
    for (std::size_t k : sols[s].converged_indices()) items.push_back({sols[s].energies[k], s, k});
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.e < b.e; });
  for (const auto& it : items) visit(it.s, it.k);
}

std::vector<double> column_of(const std::vector<DeviationPoint>& pts, double DeviationPoint::*field) {
  std::vector<double> out;
  for (const auto& p : pts) out.push_back(p.*field);
  return out;
}

// Deviation profile of `values` restricted to lo <= epsilon <= hi.
std::vector<DeviationPoint> profile_in(const std::vector<double>& eps, const std::vector<double>& values,
                                       double lo, double hi, int window, int stride) {
  std::vector<double> e, v;
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (eps[i] >= lo && eps[i] <= hi && !std::isnan(values[i])) {
      e.push_back(eps[i]);
      v.push_back(values[i]);
    }
  if (e.size() < static_cast<std::size_t>(window)) return {};
  return delta_mic_profile(e, v, window, stride);
}

// --- pipelines -------------------------------------------------------------------

ResultArchive spectrum(const RunConfig& c, const RunContext& ctx) {
  ResultArchive a;
  std::vector<double> eps, par, conv, index;
  json sectors = json::array();
  for (ParitySector s : c.sectors()) {
    const EigenSolution sol =
        solve_sector(c.model, c.basis, c.cutoff, s, EigenJob::ValuesOnly, c.convergence, ctx);
    for (std::size_t k = 0; k < sol.size(); ++k) {
      eps.push_back(sol.energies[k]);
      par.push_back(static_cast<int>(sol.parity[k]));
      conv.push_back(sol.converged[k] ? 1.0 : 0.0);
      index.push_back(static_cast<double>(k));
    }
    sectors.push_back({{"sector", to_string(s)},
                       {"dimension", sol.size()},
                       {"converged", sol.converged_indices().size()},
                       {"epsilon_T", sol.epsilon_T}});
  }
  a.add("spectrum")
      .add("index", "1", index)
      .add("epsilon", kEps, eps)
      .add("parity", "+1/-1", par)
      .add("converged", "0/1", conv);
  a.metadata["sectors"] = sectors;
  return a;
}

ResultArchive chaos_map(const RunConfig& c, const RunContext& ctx) {
  ChaosMapOptions opt;
  opt.samples_per_cell = c.chaos_map.samples_per_cell;
  opt.lambda_cut = c.chaos_map.lambda_cut;
  opt.seed = c.seed;
  opt.t_final = c.chaos_map.t_final;
  opt.threads = ctx.threads;
  opt.lyapunov.renormalize_dt = c.chaos_map.renormalize_dt;
  const auto t0 = Clock::now();
  const ChaosMap m = chaos_fraction_map(c.chaos_map.epsilon.points(), c.chaos_map.gamma.points(), c.model, opt);
  if (ctx.log) ctx.log->add("chaos map", seconds_since(t0), false);
  std::vector<double> eps, gam, frac;
  for (std::size_t g = 0; g < m.gamma_grid.size(); ++g)
    for (std::size_t e = 0; e < m.epsilon_grid.size(); ++e) {
      eps.push_back(m.epsilon_grid[e]);
      gam.push_back(m.gamma_grid[g]);
      frac.push_back(m.fraction(static_cast<long>(g), static_cast<long>(e)));
    }
  ResultArchive a;
  a.add("chaos_map").add("epsilon", kEps, eps).add("gamma", "omega", gam).add("fraction", "1", frac);
  a.metadata["samples_per_cell"] = m.samples_per_cell;
  a.metadata["lambda_cut"] = m.lambda_cut;
  a.metadata["seed"] = m.seed;
  a.metadata["t_final"] = m.t_final;
  return a;
}

ResultArchive ratio_map(const RunConfig& c, const RunContext& ctx) {
  const ParitySector sector = single_sector(c, "r-map");
  const auto gammas = c.r_map.gamma.points();
  std::vector<EigenSolution> spectra;
  json edges = json::array();
  for (double g : gammas) {
    ModelParams p = c.model;
    p.gamma = g;
    spectra.push_back(solve_sector(p, c.basis, c.cutoff, sector, EigenJob::ValuesOnly, c.convergence, ctx));
    spectra.back().params.gamma = g;
    edges.push_back(spectra.back().epsilon_T);
  }
  const RatioMap m = r_map(spectra, c.r_map.epsilon.points(), c.r_map.window);
  std::vector<double> eps, gam, mean;
  for (std::size_t g = 0; g < gammas.size(); ++g)
    for (std::size_t e = 0; e < m.epsilon_grid.size(); ++e) {
      eps.push_back(m.epsilon_grid[e]);
      gam.push_back(gammas[g]);
      mean.push_back(m.mean(static_cast<long>(g), static_cast<long>(e)));
    }
  ResultArchive a;
  a.add("r_map").add("epsilon", kEps, eps).add("gamma", "omega", gam).add("mean_ratio", "1", mean);
  a.metadata["window_levels"] = m.window_levels;
  a.metadata["epsilon_T"] = edges;
  a.metadata["sector"] = to_string(sector);
  return a;
}

ResultArchive peres(const RunConfig& c, const RunContext& ctx) {
  const auto& o = c.observables;
  std::vector<EigenSolution> sols;
  std::vector<Eigen::VectorXd> n, ex;
  for (ParitySector s : c.sectors()) {
    sols.push_back(solve_sector(c.model, c.basis, c.cutoff, s, EigenJob::Vectors, c.convergence, ctx));
    const auto idx = sols.back().converged_indices();
    if (idx.empty()) throw ConvergenceError("no converged states in the " + to_string(s) + " sector");
    const auto t0 = Clock::now();
    Eigen::VectorXd fn = Eigen::VectorXd::Constant(sols.back().size(), kNaN), fe = fn;
    const Eigen::VectorXd dn = observable_diagonal(sols.back(), ObservableKind::PhotonNumber, idx, true, o.route);
    const Eigen::VectorXd de = observable_diagonal(sols.back(), ObservableKind::ExcitedAtoms, idx, true, o.route);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      fn(static_cast<long>(idx[i])) = dn(static_cast<long>(i));
      fe(static_cast<long>(idx[i])) = de(static_cast<long>(i));
    }
    n.push_back(fn);
    ex.push_back(fe);
    if (ctx.log) ctx.log->add("observables " + to_string(s), seconds_since(t0), false);
  }
  std::vector<double> eps, par, vn, vex;
  merged_order(sols, [&](std::size_t s, std::size_t k) {
    eps.push_back(sols[s].energies[k]);
    par.push_back(static_cast<int>(sols[s].parity[k]));
    vn.push_back(n[s](static_cast<long>(k)));
    vex.push_back(ex[s](static_cast<long>(k)));
  });
  const int window = mic_window(o.window, c.model.j());
  const auto pn = profile_in(eps, vn, o.lo, o.hi, window, o.stride);
  const auto pe = profile_in(eps, vex, o.lo, o.hi, window, o.stride);

  ResultArchive a;
  a.add("peres").add("epsilon", kEps, eps).add("parity", "+1/-1", par).add("n", "1/j", vn).add("n_ex", "1/j", vex);
  a.add("deviation")
      .add("epsilon", kEps, column_of(pn, &DeviationPoint::epsilon))
      .add("delta_n", "1", column_of(pn, &DeviationPoint::delta))
      .add("extremal_n", "1", column_of(pn, &DeviationPoint::extremal))
      .add("delta_nex", "1", column_of(pe, &DeviationPoint::delta))
      .add("extremal_nex", "1", column_of(pe, &DeviationPoint::extremal));
  a.metadata["window_levels"] = window;
  a.metadata["deviation_range"] = {o.lo, o.hi};
  json edges = json::array();
  for (const auto& s : sols) edges.push_back(s.epsilon_T);
  a.metadata["epsilon_T"] = edges;
  return a;
}

ResultArchive eth_stats(const RunConfig& c, const RunContext& ctx) {
  const auto& o = c.observables;
  const ParitySector sector = single_sector(c, "eth-stats");
  const EigenSolution sol = solve_sector(c.model, c.basis, c.cutoff, sector, EigenJob::Vectors, c.convergence, ctx);
  const auto states = states_in_range(sol, o.eth_lo, o.eth_hi);
  if (states.size() < kMinDistributionStates) {
    throw SampleSizeError("only " + std::to_string(states.size()) + " converged states in (" +
                          std::to_string(o.eth_lo) + ", " + std::to_string(o.eth_hi) + ")");
  }
  const auto t0 = Clock::now();
  const ObservableMatrix mn = observable_matrix(sol, ObservableKind::PhotonNumber, states, true, o.route);
  const ObservableMatrix me = observable_matrix(sol, ObservableKind::ExcitedAtoms, states, true, o.route);
  if (ctx.log) ctx.log->add("observable matrices", seconds_since(t0), false);

  const Eigen::VectorXd dn = mn.diagonal(), de = me.diagonal();
  const std::span<const double> sn(dn.data(), states.size()), se(de.data(), states.size());
  const Distribution diag_n = diagonal_distribution(mn.energies, sn, o.eth_lo, o.eth_hi, o.centering_window, o.bins);
  const Distribution diag_e = diagonal_distribution(me.energies, se, o.eth_lo, o.eth_hi, o.centering_window, o.bins);
  const Distribution off_n = offdiagonal_distribution(mn, o.eth_lo, o.eth_hi, o.omega_max, false, o.bins);
  const Distribution off_e = offdiagonal_distribution(me, o.eth_lo, o.eth_hi, o.omega_max, false, o.bins);
  const Distribution all_n = offdiagonal_distribution(mn, o.eth_lo, o.eth_hi);
  const Distribution all_e = offdiagonal_distribution(me, o.eth_lo, o.eth_hi);

  std::vector<double> pair_eps, pair_omega;
  for (std::size_t x = 0; x < states.size(); ++x)
    for (std::size_t y = x + 1; y < states.size(); ++y) {
      const double w = std::abs(mn.energies[x] - mn.energies[y]);
      if (w > o.omega_max) continue;
      pair_eps.push_back(0.5 * (mn.energies[x] + mn.energies[y]));
      pair_omega.push_back(w);
    }

  ResultArchive a;
  a.add("eth_diagonal")
      .add("epsilon", kEps, mn.energies)
      .add("n", "1/j", std::vector<double>(dn.data(), dn.data() + dn.size()))
      .add("n_ex", "1/j", std::vector<double>(de.data(), de.data() + de.size()))
      .add("n_centered", "1/j", diag_n.values)
      .add("nex_centered", "1/j", diag_e.values);
  a.add("eth_offdiagonal")
      .add("epsilon", kEps, pair_eps)
      .add("omega", kEps, pair_omega)
      .add("n", "1/j", off_n.values)
      .add("n_ex", "1/j", off_e.values);
  auto hist = [&](const std::string& name, const Histogram& h) {
    std::vector<double> lo(h.edges.begin(), h.edges.end() - 1), hi(h.edges.begin() + 1, h.edges.end());
    std::vector<double> counts(h.counts.begin(), h.counts.end());
    a.add(name).add("left", "1/j", lo).add("right", "1/j", hi).add("count", "states", counts);
  };
  hist("hist_diagonal_n", diag_n.histogram);
  hist("hist_diagonal_nex", diag_e.histogram);
  hist("hist_offdiagonal_n", off_n.histogram);
  hist("hist_offdiagonal_nex", off_e.histogram);
  a.metadata["fit_diagonal_n"] = moments_json(diag_n.fit);
  a.metadata["fit_diagonal_nex"] = moments_json(diag_e.fit);
  a.metadata["fit_offdiagonal_n"] = moments_json(off_n.fit);
  a.metadata["fit_offdiagonal_nex"] = moments_json(off_e.fit);
  a.metadata["fit_offdiagonal_n_all_pairs"] = moments_json(all_n.fit);
  a.metadata["fit_offdiagonal_nex_all_pairs"] = moments_json(all_e.fit);
  a.metadata["omega_max"] = o.omega_max;
  a.metadata["eth_range"] = {o.eth_lo, o.eth_hi};
  a.metadata["centering_window"] = o.centering_window;
  a.metadata["sector"] = to_string(sector);
  a.metadata["epsilon_T"] = sol.epsilon_T;
  return a;
}

std::set<EntropyKind> entropy_kinds(const RunConfig& c) {
  std::set<EntropyKind> k;
  if (c.entropy.entanglement) k.insert(EntropyKind::Entanglement);
  if (c.entropy.shannon_fock) k.insert(EntropyKind::ShannonFock);
  if (c.entropy.shannon_efficient) {
    if (c.basis != BasisKind::Efficient) {
      throw ConfigError("entropy.shannon_efficient: needs basis.kind = efficient");
    }
    k.insert(EntropyKind::ShannonEfficient);
  }
  if (k.empty()) throw ConfigError("entropy: no entropy kind selected");
  return k;
}

void add_entropy_dataset(ResultArchive& a, const std::string& name, const std::vector<EntropyRecord>& rec,
                         const std::vector<double>* lambda = nullptr) {
  std::vector<double> eps, par, sen, sen_s, sf, se, sf_s, se_s, ef, ee;
  for (const auto& r : rec) {
    eps.push_back(r.epsilon);
    par.push_back(static_cast<int>(r.parity));
    sen.push_back(r.S_En);
    sen_s.push_back(r.entanglement_scaled());
    sf.push_back(r.S_Sh_fock);
    se.push_back(r.S_Sh_eff);
    sf_s.push_back(r.shannon_fock_scaled());
    se_s.push_back(r.shannon_efficient_scaled());
    ef.push_back(std::exp(r.S_Sh_fock));
    ee.push_back(std::exp(r.S_Sh_eff));
  }
  Dataset& d = a.add(name);
  d.add("epsilon", kEps, eps).add("parity", "+1/-1", par);
  if (lambda) d.add("lambda", "excitations", *lambda);
  d.add("S_En", "nats", sen)
      .add("exp_S_En_scaled", "1/(2j+1)", sen_s)
      .add("S_Sh_fock", "nats", sf)
      .add("S_Sh_eff", "nats", se)
      .add("S_Sh_fock_scaled", "1/ln(2j^2)", sf_s)
      .add("S_Sh_eff_scaled", "1/ln(2j^2)", se_s)
      .add("exp_S_Sh_fock", "states", ef)
      .add("exp_S_Sh_eff", "states", ee);
}

ResultArchive entropy(const RunConfig& c, const RunContext& ctx) {
  const auto kinds = entropy_kinds(c);
  std::vector<EntropyRecord> all;
  json edges = json::array();
  for (ParitySector s : c.sectors()) {
    const EigenSolution sol = solve_sector(c.model, c.basis, c.cutoff, s, EigenJob::Vectors, c.convergence, ctx);
    const auto t0 = Clock::now();
    const auto rec = entropy_lattice(sol, kinds, {}, ctx.threads);
    if (ctx.log) ctx.log->add("entropies " + to_string(s), seconds_since(t0), false);
    all.insert(all.end(), rec.begin(), rec.end());
    edges.push_back(sol.epsilon_T);
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.epsilon < y.epsilon; });
  ResultArchive a;
  add_entropy_dataset(a, "entropy", all);

  const int window = mic_window(c.entropy.window, c.model.j());
  std::vector<double> eps;
  for (const auto& r : all) eps.push_back(r.epsilon);
  auto values = [&](double EntropyRecord::*f) {
    std::vector<double> v;
    for (const auto& r : all) v.push_back(r.*f);
    return v;
  };
  const double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  auto profile = [&](double EntropyRecord::*f, bool wanted) {
    return wanted ? profile_in(eps, values(f), lo, hi, window, c.entropy.stride) : std::vector<DeviationPoint>{};
  };
  const auto pen = profile(&EntropyRecord::S_En, c.entropy.entanglement);
  const auto pf = profile(&EntropyRecord::S_Sh_fock, c.entropy.shannon_fock);
  const auto pe = profile(&EntropyRecord::S_Sh_eff, c.entropy.shannon_efficient);
  std::size_t rows = std::max({pen.size(), pf.size(), pe.size()});
  auto padded = [&](const std::vector<DeviationPoint>& p, double DeviationPoint::*f) {
    std::vector<double> v = column_of(p, f);
    v.resize(rows, kNaN);
    return v;
  };
  const auto& ref = !pen.empty() ? pen : (!pe.empty() ? pe : pf);
  a.add("entropy_deviation")
      .add("epsilon", kEps, padded(ref, &DeviationPoint::epsilon))
      .add("delta_S_En", "1", padded(pen, &DeviationPoint::delta))
      .add("extremal_S_En", "1", padded(pen, &DeviationPoint::extremal))
      .add("delta_S_Sh_fock", "1", padded(pf, &DeviationPoint::delta))
      .add("extremal_S_Sh_fock", "1", padded(pf, &DeviationPoint::extremal))
      .add("delta_S_Sh_eff", "1", padded(pe, &DeviationPoint::delta))
      .add("extremal_S_Sh_eff", "1", padded(pe, &DeviationPoint::extremal));
  a.metadata["window_levels"] = window;
  a.metadata["shannon_normalization"] = "ln(2 j^2)";
  a.metadata["epsilon_T"] = edges;
  return a;
}

ResultArchive tc_compare(const RunConfig& c, const RunContext& ctx) {
  const int lambda_max = c.tc.lambda_max > 0 ? c.tc.lambda_max : tavis_cummings_lambda_cover(c.model, 2.0);
  const auto t0 = Clock::now();
  const EigenSolution tc = tavis_cummings_spectrum(c.model, lambda_max);
  if (ctx.log) ctx.log->add("tavis-cummings spectrum", seconds_since(t0), false);
  auto rec = entropy_lattice(tc, {EntropyKind::Entanglement, EntropyKind::ShannonFock}, {}, ctx.threads);
  std::stable_sort(rec.begin(), rec.end(), [](const auto& x, const auto& y) { return x.epsilon < y.epsilon; });
  std::vector<double> lambda;
  for (const auto& r : rec) lambda.push_back(tc.lambda[r.state]);
  ResultArchive a;
  add_entropy_dataset(a, "tc_entropy", rec, &lambda);

  const Parity parity = c.parity == ParityChoice::Odd ? Parity::Odd : Parity::Even;
  std::vector<double> levels;
  for (std::size_t k : tc.converged_indices(parity)) levels.push_back(tc.energies[k]);
  std::sort(levels.begin(), levels.end());
  const RatioSeries series = consecutive_ratios(levels);
  const int window = c.tc.window > 0 ? c.tc.window : default_window(levels.size());
  const auto wm = windowed_average(series, window, std::max(1, window / 10));
  std::vector<double> we, wv;
  for (const auto& w : wm) {
    we.push_back(w.epsilon);
    wv.push_back(w.mean);
  }
  a.add("tc_ratios").add("epsilon", kEps, we).add("mean_ratio", "1", wv);
  a.metadata["lambda_max"] = lambda_max;
  a.metadata["epsilon_T"] = tc.epsilon_T;
  a.metadata["ratio_parity"] = parity == Parity::Even ? "even" : "odd";
  a.metadata["ratio_window"] = window;
  a.metadata["merged_levels"] = series.merged;
  return a;
}

ResultArchive dos(const RunConfig& c, const RunContext& ctx) {
  const auto grid = c.dos.epsilon.points();
  const double e_gs = classical_ground_energy(c.model);
  std::vector<double> nu, count, quantum(grid.size(), kNaN);
  for (double e : grid) {
    nu.push_back(e > e_gs ? semiclassical_dos(e, c.model) : 0.0);
    count.push_back(e > e_gs ? semiclassical_state_count(e, c.model) : 0.0);
  }
  ResultArchive a;
  if (c.dos.quantum) {
    std::vector<double> levels;
    double edge = std::numeric_limits<double>::infinity();
    for (ParitySector s : {ParitySector::Even, ParitySector::Odd}) {
      const EigenSolution sol =
          solve_sector(c.model, c.basis, c.cutoff, s, EigenJob::ValuesOnly, c.convergence, ctx);
      for (std::size_t k : sol.converged_indices()) levels.push_back(sol.energies[k]);
      edge = std::min(edge, sol.epsilon_T);
    }
    std::sort(levels.begin(), levels.end());
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i] <= edge)
        quantum[i] = static_cast<double>(std::upper_bound(levels.begin(), levels.end(), grid[i]) - levels.begin());
    a.metadata["epsilon_T"] = edge;
  }
  a.add("dos")
      .add("epsilon", kEps, grid)
      .add("nu", "states per unit epsilon", nu)
      .add("count_semiclassical", "states", count)
      .add("count_quantum", "states", quantum);
  a.metadata["epsilon_gs"] = e_gs;
  return a;
}

}  // namespace

void RunLog::add(const std::string& what, double seconds, bool cache_hit) {
  entries.push_back({{"step", what}, {"seconds", seconds}, {"cache_hit", cache_hit}});
}

EigenSolution solve_sector(const ModelParams& params, BasisKind kind, int cutoff, ParitySector sector,
                           EigenJob job, const ConvergenceTolerances& tol, const RunContext& ctx) {
  const BasisSpec basis{kind, cutoff, sector};
  const std::string what = "solve " + to_string(kind) + " cutoff " + std::to_string(cutoff) + " " +
                           to_string(sector) + (job == EigenJob::Vectors ? " vectors" : " values");
  const auto t0 = Clock::now();
  bool hit = false;
  EigenSolution sol = ctx.cache.get(params, basis, job, tol, [&] {
    // The tail criterion needs eigenvectors even when only values are kept.
    EigenSolution s = diagonalize(build_hamiltonian(params, basis), EigenJob::Vectors);
    const BasisSpec big{kind, enlarged_cutoff(cutoff), sector};
    s = filter_converged(s, diagonalize(build_hamiltonian(params, big), EigenJob::ValuesOnly), tol.energy, tol.tail);
    if (job == EigenJob::ValuesOnly) s.coefficients.resize(0, 0);
    return s;
  }, &hit);
  const double dt = seconds_since(t0);
  if (ctx.log) ctx.log->add(what, dt, hit);
  log::info(what + (hit ? " (cache hit) " : " ") + std::to_string(dt) + " s");
  return sol;
}

json provenance_config(const RunConfig& config) {
  json j = to_json(config);
  j["run"].erase("output");
  j["run"].erase("cache");
  j["run"].erase("threads");
  return j;
}

std::string config_hash(const RunConfig& config) {
  const std::string text = provenance_config(config).dump();
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size()));
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

std::string code_version() { return DICKE_VERSION; }

ResultArchive run_pipeline(const RunConfig& c, const RunContext& ctx) {
  ResultArchive a;
  if (c.pipeline == "spectrum") a = spectrum(c, ctx);
  else if (c.pipeline == "chaos-map") a = chaos_map(c, ctx);
  else if (c.pipeline == "r-map") a = ratio_map(c, ctx);
  else if (c.pipeline == "peres") a = peres(c, ctx);
  else if (c.pipeline == "eth-stats") a = eth_stats(c, ctx);
  else if (c.pipeline == "entropy") a = entropy(c, ctx);
  else if (c.pipeline == "tc-compare") a = tc_compare(c, ctx);
  else if (c.pipeline == "dos") a = dos(c, ctx);
  else throw ConfigError("pipeline: unknown pipeline '" + c.pipeline + "'");

  a.metadata["pipeline"] = c.pipeline;
  a.metadata["config"] = provenance_config(c);
  a.metadata["config_hash"] = config_hash(c);
  a.metadata["code_version"] = code_version();
  a.metadata["model"] = model_json(c.model);
  a.metadata["j"] = c.model.j();
  a.metadata["tolerances"] = {{"energy", c.convergence.energy},
                              {"tail", c.convergence.tail},
                              {"degeneracy", kDegeneracyTolerance},
                              {"mapping_norm", kMappingNormTolerance},
                              {"eigenvalue_floor", kEigenvalueFloor}};
  return a;
}

RunFiles run_and_write(const RunConfig& config, const std::filesystem::path& cache_root) {
  const std::filesystem::path out = config.output;
  std::filesystem::create_directories(out);
  RunLog log;
  RunContext ctx{SolutionCache(config.cache ? (cache_root.empty() ? out / "cache" : cache_root)
                                            : std::filesystem::path{}),
                 config.threads, &log};
  const auto wall0 = std::chrono::system_clock::now();
  const auto t0 = Clock::now();
  const ResultArchive archive = run_pipeline(config, ctx);
  const double total = seconds_since(t0);

  RunFiles files{out / (config.pipeline + ".json"), out / (config.pipeline + ".run.json")};
  write_archive(archive, files.archive);

  auto stamp = [](std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return std::string(buf);
  };
  const json run = {{"pipeline", config.pipeline},
                    {"config_hash", config_hash(config)},
                    {"started", stamp(wall0)},
                    {"finished", stamp(std::chrono::system_clock::now())},
                    {"seconds", total},
                    {"threads", config.threads},
                    {"cache", ctx.cache.enabled() ? ctx.cache.root().string() : ""},
                    {"steps", log.entries}};
  std::ofstream side(files.log, std::ios::binary);
  side << run.dump(2) << '\n';
  return files;
}

}  // namespace dicke::io
