#include "dicke/io/config.hpp"

#include "dicke/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace dicke::io {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_.empty() ? "config" : path_, "expected an object");
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_.contains(key)) return;
    const json& v = node_.at(key);
    const std::string where = at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(where, "expected a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(where, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned() || v.get<long long>() >= 0) {
          out = v.get<T>();
        } else {
          fail(where, "expected a nonnegative integer");
        }
      } else {
        out = v.get<T>();
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(where, "expected a number");
      out = v.get<T>();
    } else {
      if (!v.is_string()) fail(where, "expected a string");
      out = v.get<std::string>();
    }
  }

  void read_grid(const std::string& key, Grid& out) {
    seen_.insert(key);
    if (!node_.contains(key)) return;
    const json& v = node_.at(key);
    const std::string where = at(key);
    if (v.is_array()) {
      Grid g;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(where + "[" + std::to_string(i) + "]", "expected a number");
        g.values.push_back(v[i].get<double>());
      }
      if (g.values.empty()) fail(where, "grid must not be empty");
      out = g;
      return;
    }
    Section s(v, where);
    Grid g;
    s.read("min", g.min);
    s.read("max", g.max);
    s.read("count", g.count);
    s.finish();
    if (g.count < 1) fail(where + ".count", "must be at least 1");
    if (g.count > 1 && !(g.max > g.min)) fail(where, "max must exceed min");
    out = g;
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(node_.contains(key) ? node_.at(key) : empty, at(key));
  }

  void finish() const {
    for (const auto& item : node_.items())
      if (!seen_.count(item.key())) fail(at(item.key()), "unknown key");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) Section::fail(where, what);
}

json grid_json(const Grid& g) {
  if (!g.is_range()) return g.values;
  return {{"min", g.min}, {"max", g.max}, {"count", g.count}};
}

template <typename E>
E parse_enum(const std::string& where, const std::string& text,
             std::initializer_list<std::pair<const char*, E>> choices) {
  std::string names;
  for (const auto& [name, value] : choices) {
    if (text == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  Section::fail(where, "'" + text + "' is not one of " + names);
}

}  // namespace

std::vector<double> Grid::points() const {
  if (!is_range()) return values;
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = count == 1 ? min : min + (max - min) * i / (count - 1);
  return out;
}

std::vector<ParitySector> RunConfig::sectors() const {
  switch (parity) {
    case ParityChoice::Even: return {ParitySector::Even};
    case ParityChoice::Odd: return {ParitySector::Odd};
    case ParityChoice::Both: return {ParitySector::Even, ParitySector::Odd};
  }
  return {};
}

bool RunConfig::operator==(const RunConfig& o) const {
  return pipeline == o.pipeline && model == o.model && basis == o.basis && cutoff == o.cutoff &&
         parity == o.parity && convergence.energy == o.convergence.energy &&
         convergence.tail == o.convergence.tail && seed == o.seed && threads == o.threads &&
         output == o.output && cache == o.cache && chaos_map == o.chaos_map && r_map == o.r_map &&
         observables == o.observables && entropy == o.entropy && tc == o.tc && dos == o.dos;
}

int default_mic_window(double j) { return std::max(5, static_cast<int>(std::lround(j * j / 9.0))); }

std::string to_string(ParityChoice p) {
  switch (p) {
    case ParityChoice::Even: return "even";
    case ParityChoice::Odd: return "odd";
    case ParityChoice::Both: return "both";
  }
  return "unknown";
}

RunConfig parse_config(const json& doc) {
  RunConfig c;
  Section root(doc, "");
  root.read("pipeline", c.pipeline);
  require(std::find(kPipelines.begin(), kPipelines.end(), c.pipeline) != kPipelines.end(), "pipeline",
          "unknown pipeline '" + c.pipeline + "'");

  {
    Section s = root.child("model");
    double j = c.model.j();
    s.read("omega", c.model.omega);
    s.read("omega0", c.model.omega0);
    s.read("gamma", c.model.gamma);
    s.read("j", j);
    s.finish();
    require(c.model.omega > 0, "model.omega", "must be positive");
    require(c.model.omega0 > 0, "model.omega0", "must be positive");
    require(c.model.gamma >= 0, "model.gamma", "must be nonnegative");
    require(j > 0 && std::abs(2 * j - std::round(2 * j)) < 1e-12, "model.j", "must be a positive half-integer");
    c.model.two_j = static_cast<int>(std::lround(2 * j));
  }
  {
    Section s = root.child("basis");
    std::string kind = to_string(c.basis), parity = to_string(c.parity);
    s.read("kind", kind);
    s.read("cutoff", c.cutoff);
    s.read("parity", parity);
    s.finish();
    c.basis = parse_enum<BasisKind>("basis.kind", kind, {{"efficient", BasisKind::Efficient}, {"fock", BasisKind::Fock}});
    c.parity = parse_enum<ParityChoice>(
        "basis.parity", parity,
        {{"even", ParityChoice::Even}, {"odd", ParityChoice::Odd}, {"both", ParityChoice::Both}});
    require(c.cutoff >= 1, "basis.cutoff", "must be at least 1");
  }
  {
    Section s = root.child("convergence");
    s.read("energy", c.convergence.energy);
    s.read("tail", c.convergence.tail);
    s.finish();
    require(c.convergence.energy > 0, "convergence.energy", "must be positive");
    require(c.convergence.tail > 0, "convergence.tail", "must be positive");
  }
  {
    Section s = root.child("run");
    s.read("seed", c.seed);
    s.read("threads", c.threads);
    s.read("output", c.output);
    s.read("cache", c.cache);
    s.finish();
    require(c.threads >= 0, "run.threads", "must be nonnegative");
    require(!c.output.empty(), "run.output", "must not be empty");
  }
  {
    Section s = root.child("chaos_map");
    auto& m = c.chaos_map;
    s.read_grid("epsilon", m.epsilon);
    s.read_grid("gamma", m.gamma);
    s.read("samples_per_cell", m.samples_per_cell);
    s.read("lambda_cut", m.lambda_cut);
    s.read("t_final", m.t_final);
    s.read("renormalize_dt", m.renormalize_dt);
    s.finish();
    require(m.samples_per_cell >= 1, "chaos_map.samples_per_cell", "must be at least 1");
    require(m.t_final > 0, "chaos_map.t_final", "must be positive");
    require(m.renormalize_dt > 0, "chaos_map.renormalize_dt", "must be positive");
  }
  {
    Section s = root.child("r_map");
    s.read_grid("gamma", c.r_map.gamma);
    s.read_grid("epsilon", c.r_map.epsilon);
    s.read("window", c.r_map.window);
    s.finish();
    require(c.r_map.window == 0 || c.r_map.window >= 10, "r_map.window", "must be 0 or at least 10");
  }
  {
    Section s = root.child("observables");
    auto& o = c.observables;
    std::string route = o.route == ObservableRoute::Mapping ? "mapping" : "native";
    s.read("lo", o.lo);
    s.read("hi", o.hi);
    s.read("window", o.window);
    s.read("stride", o.stride);
    s.read("eth_lo", o.eth_lo);
    s.read("eth_hi", o.eth_hi);
    s.read("omega_max", o.omega_max);
    s.read("centering_window", o.centering_window);
    s.read("bins", o.bins);
    s.read("route", route);
    s.finish();
    o.route = parse_enum<ObservableRoute>("observables.route", route,
                                          {{"mapping", ObservableRoute::Mapping}, {"native", ObservableRoute::Native}});
    require(o.hi > o.lo, "observables.hi", "must exceed lo");
    require(o.eth_hi > o.eth_lo, "observables.eth_hi", "must exceed eth_lo");
    require(o.window >= 0, "observables.window", "must be nonnegative");
    require(o.stride >= 1, "observables.stride", "must be at least 1");
    require(o.omega_max > 0, "observables.omega_max", "must be positive");
    require(o.centering_window >= 1, "observables.centering_window", "must be at least 1");
    require(o.bins >= 1, "observables.bins", "must be at least 1");
  }
  {
    Section s = root.child("entropy");
    auto& e = c.entropy;
    s.read("entanglement", e.entanglement);
    s.read("shannon_fock", e.shannon_fock);
    s.read("shannon_efficient", e.shannon_efficient);
    s.read("window", e.window);
    s.read("stride", e.stride);
    s.finish();
    require(e.window >= 0, "entropy.window", "must be nonnegative");
    require(e.stride >= 1, "entropy.stride", "must be at least 1");
  }
  {
    Section s = root.child("tc");
    s.read("lambda_max", c.tc.lambda_max);
    s.read("window", c.tc.window);
    s.finish();
    require(c.tc.lambda_max >= 0, "tc.lambda_max", "must be nonnegative");
    require(c.tc.window == 0 || c.tc.window >= 10, "tc.window", "must be 0 or at least 10");
  }
  {
    Section s = root.child("dos");
    s.read_grid("epsilon", c.dos.epsilon);
    s.read("quantum", c.dos.quantum);
    s.finish();
  }
  root.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  const auto& m = c.chaos_map;
  const auto& o = c.observables;
  const auto& e = c.entropy;
  return {
      {"pipeline", c.pipeline},
      {"model", {{"omega", c.model.omega}, {"omega0", c.model.omega0}, {"gamma", c.model.gamma}, {"j", c.model.j()}}},
      {"basis", {{"kind", to_string(c.basis)}, {"cutoff", c.cutoff}, {"parity", to_string(c.parity)}}},
      {"convergence", {{"energy", c.convergence.energy}, {"tail", c.convergence.tail}}},
      {"run", {{"seed", c.seed}, {"threads", c.threads}, {"output", c.output}, {"cache", c.cache}}},
      {"chaos_map",
       {{"epsilon", grid_json(m.epsilon)},
        {"gamma", grid_json(m.gamma)},
        {"samples_per_cell", m.samples_per_cell},
        {"lambda_cut", m.lambda_cut},
        {"t_final", m.t_final},
        {"renormalize_dt", m.renormalize_dt}}},
      {"r_map", {{"gamma", grid_json(c.r_map.gamma)}, {"epsilon", grid_json(c.r_map.epsilon)}, {"window", c.r_map.window}}},
      {"observables",
       {{"lo", o.lo},
        {"hi", o.hi},
        {"window", o.window},
        {"stride", o.stride},
        {"eth_lo", o.eth_lo},
        {"eth_hi", o.eth_hi},
        {"omega_max", o.omega_max},
        {"centering_window", o.centering_window},
        {"bins", o.bins},
        {"route", o.route == ObservableRoute::Mapping ? "mapping" : "native"}}},
      {"entropy",
       {{"entanglement", e.entanglement},
        {"shannon_fock", e.shannon_fock},
        {"shannon_efficient", e.shannon_efficient},
        {"window", e.window},
        {"stride", e.stride}}},
      {"tc", {{"lambda_max", c.tc.lambda_max}, {"window", c.tc.window}}},
      {"dos", {{"epsilon", grid_json(c.dos.epsilon)}, {"quantum", c.dos.quantum}}},
  };
}

}  // namespace dicke::io
