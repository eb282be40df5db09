#include "qchaos/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "qchaos/errors.hpp"

namespace qchaos {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

// Typed reader over one section; remembers which keys were consumed so that
// leftovers can be reported as unknown.
class SectionReader {
 public:
  SectionReader(std::string name, const std::map<std::string, std::string>* kv)
      : name_(std::move(name)), kv_(kv) {}

  void real(const char* key, double& out) {
    if (auto v = take(key)) out = parse_real(key, *v);
  }

  void count(const char* key, std::size_t& out) {
    if (auto v = take(key)) out = static_cast<std::size_t>(parse_uint(key, *v));
  }

  void seed(const char* key, std::uint64_t& out) {
    if (auto v = take(key)) out = parse_uint(key, *v);
  }

  void text(const char* key, std::string& out) {
    if (auto v = take(key)) out = *v;
  }

  void list(const char* key, std::vector<double>& out) {
    auto v = take(key);
    if (!v) return;
    out.clear();
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) fail(key, "empty list");
  }

  void finish() const {
    if (!kv_) return;
    for (const auto& [k, v] : *kv_) {
      if (!used_.count(k)) throw ConfigError("[" + name_ + "] unknown key '" + k + "'");
    }
  }

 private:
  std::optional<std::string> take(const char* key) {
    if (!kv_) return std::nullopt;
    auto it = kv_->find(key);
    if (it == kv_->end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  [[noreturn]] void fail(const char* key, const std::string& why) const {
    throw ConfigError("[" + name_ + "] " + key + ": " + why);
  }

  double parse_real(const char* key, const std::string& s) const {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (!s.empty() && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || s.empty()) fail(key, "expected a number, got '" + s + "'");
    return v;
  }

  std::uint64_t parse_uint(const char* key, const std::string& s) const {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      fail(key, "expected a non-negative integer, got '" + s + "'");
    }
    return v;
  }

  std::string name_;
  const std::map<std::string, std::string>* kv_;
  std::set<std::string> used_;
};

Renormalization parse_renorm(const std::string& s) {
  if (s == "redisplace") return Renormalization::Redisplace;
  if (s == "tangent") return Renormalization::Tangent;
  throw ConfigError("renormalization must be 'redisplace' or 'tangent', got '" + s + "'");
}

LyapunovSystem parse_system(const std::string& s) {
  if (s == "quantum") return LyapunovSystem::Quantum;
  if (s == "cumulant") return LyapunovSystem::Cumulant;
  if (s == "langevin") return LyapunovSystem::Langevin;
  throw ConfigError("system must be quantum, cumulant or langevin, got '" + s + "'");
}

const char* section_for(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::StrongQct: return "strong";
    case ExperimentKind::WeakQct: return "weak";
    case ExperimentKind::LyapunovSweep: return "sweep";
    case ExperimentKind::StrobeMap: return "strobe";
    case ExperimentKind::IsolatedDecay: return "decay";
  }
  return "";
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::StrongQct: return "strong-qct";
    case ExperimentKind::WeakQct: return "weak-qct";
    case ExperimentKind::LyapunovSweep: return "lyapunov-sweep";
    case ExperimentKind::StrobeMap: return "strobe-map";
    case ExperimentKind::IsolatedDecay: return "isolated-decay";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::StrongQct, ExperimentKind::WeakQct, ExperimentKind::LyapunovSweep,
                 ExperimentKind::StrobeMap, ExperimentKind::IsolatedDecay}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(Renormalization r) {
  return r == Renormalization::Redisplace ? "redisplace" : "tangent";
}

std::string to_string(LyapunovSystem s) {
  switch (s) {
    case LyapunovSystem::Quantum: return "quantum";
    case LyapunovSystem::Cumulant: return "cumulant";
    case LyapunovSystem::Langevin: return "langevin";
  }
  return "unknown";
}

PhaseSpaceGrid GridSpec::phase_space(double hbar) const {
  const SpatialGrid g = spatial();
  if (n_p == 0) {
    const double pm = g.p_max(hbar);
    return PhaseSpaceGrid(g, -pm, pm, 2 * n);
  }
  return PhaseSpaceGrid(g, p_min, p_max, n_p);
}

IniSections parse_ini(std::istream& in, const std::string& source) {
  IniSections out;
  std::string line, current;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ConfigError(where + "empty section name");
      if (out.count(current)) throw ConfigError(where + "duplicate section [" + current + "]");
      out[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    if (current.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (!out[current].emplace(key, value).second) {
      throw ConfigError(where + "duplicate key '" + key + "' in [" + current + "]");
    }
  }
  return out;
}

ExperimentConfig config_from_sections(const IniSections& sections) {
  static const std::set<std::string> known{"experiment", "model",  "initial", "numerics", "strong",
                                           "weak",       "sweep",  "strobe",  "decay"};
  for (const auto& [name, kv] : sections) {
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
  }
  auto section = [&](const char* name) -> const std::map<std::string, std::string>* {
    auto it = sections.find(name);
    return it == sections.end() ? nullptr : &it->second;
  };
  if (!section("experiment")) throw ConfigError("missing section [experiment]");
  if (!section("model")) throw ConfigError("missing section [model]");

  ExperimentConfig cfg;
  {
    SectionReader r("experiment", section("experiment"));
    std::string name;
    r.text("name", name);
    if (name.empty()) throw ConfigError("[experiment] name is required");
    cfg.kind = parse_experiment_kind(name);
    r.text("out", cfg.out_dir);
    r.finish();
  }
  for (const char* s : {"strong", "weak", "sweep", "strobe", "decay"}) {
    if (section(s) && std::string(s) != section_for(cfg.kind)) {
      throw ConfigError(std::string("section [") + s + "] does not apply to " + to_string(cfg.kind));
    }
  }
  {
    SectionReader r("model", section("model"));
    std::vector<double> coeffs = cfg.model.potential.coeffs();
    double amp = cfg.model.potential.drive_amp(), omega = cfg.model.potential.drive_omega();
    r.list("coeffs", coeffs);
    r.real("drive_amp", amp);
    r.real("drive_omega", omega);
    r.real("mass", cfg.model.mass);
    r.real("hbar", cfg.model.hbar);
    r.real("k", cfg.model.k);
    r.real("D", cfg.model.D);
    r.real("x_min", cfg.grid.x_min);
    r.real("x_max", cfg.grid.x_max);
    r.count("n", cfg.grid.n);
    r.real("p_min", cfg.grid.p_min);
    r.real("p_max", cfg.grid.p_max);
    r.count("n_p", cfg.grid.n_p);
    r.finish();
    try {
      cfg.model.potential = PotentialSpec(coeffs, amp, omega);
      cfg.model.validate();
      (void)cfg.grid.spatial();
      if (cfg.grid.n_p != 0) (void)cfg.grid.phase_space(cfg.model.hbar);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[model] ") + e.what());
    }
  }
  {
    SectionReader r("initial", section("initial"));
    r.real("x0", cfg.initial.x0);
    r.real("p0", cfg.initial.p0);
    r.real("sigma_x", cfg.initial.sigma_x);
    r.finish();
  }
  {
    auto& n = cfg.numerics;
    SectionReader r("numerics", section("numerics"));
    double dt = 0.0;
    r.real("dt", dt);
    r.count("steps_per_period", n.steps_per_period);
    r.real("t_total", n.t_total);
    r.count("ensemble_n", n.ensemble_n);
    r.seed("base_seed", n.base_seed);
    r.real("tau_r", n.tau_r);
    r.real("delta0", n.delta0);
    r.count("check_every", n.check_every);
    r.count("record_every", n.record_every);
    r.count("workers", n.workers);
    r.finish();
    if (dt > 0.0) {
      // Round up to a whole number of steps per drive period.
      n.steps_per_period = static_cast<std::size_t>(std::ceil(cfg.model.drive_period() / dt - 1e-9));
    }
    if (n.steps_per_period == 0) throw ConfigError("[numerics] steps_per_period must be > 0");
    if (!(n.t_total > 0.0)) throw ConfigError("[numerics] t_total must be > 0");
    if (n.ensemble_n == 0) throw ConfigError("[numerics] ensemble_n must be > 0");
    if (!(n.tau_r > 0.0) || !(n.delta0 > 0.0)) throw ConfigError("[numerics] tau_r and delta0 must be > 0");
    if (n.record_every == 0) throw ConfigError("[numerics] record_every must be > 0");
  }
  switch (cfg.kind) {
    case ExperimentKind::StrongQct: {
      SectionReader r("strong", section("strong"));
      r.real("window", cfg.strong.window);
      r.real("tolerance", cfg.strong.tolerance);
      r.text("action_convention", cfg.strong.action_convention);
      r.real("action_s", cfg.strong.action_s);
      r.real("sqrt_vx_bound", cfg.strong.sqrt_vx_bound);
      r.count("orbit_periods", cfg.strong.orbit_periods);
      r.finish();
      const auto& c = cfg.strong.action_convention;
      if (c != "orbit" && c != "fixed") throw ConfigError("[strong] action_convention must be 'orbit' or 'fixed'");
      if (c == "fixed" && !(cfg.strong.action_s > 0.0)) throw ConfigError("[strong] fixed convention needs action_s > 0");
      break;
    }
    case ExperimentKind::WeakQct: {
      SectionReader r("weak", section("weak"));
      r.list("D_values", cfg.weak.d_values);
      r.real("area", cfg.weak.area);
      r.real("u0", cfg.weak.u0);
      r.count("orbit_periods", cfg.weak.orbit_periods);
      r.count("snapshot_every", cfg.weak.snapshot_every);
      r.finish();
      for (double d : cfg.weak.d_values) {
        if (!(d > 0.0)) throw ConfigError("[weak] D_values must be > 0");
      }
      break;
    }
    case ExperimentKind::LyapunovSweep: {
      SectionReader r("sweep", section("sweep"));
      std::string system = "quantum", renorm = "redisplace";
      r.list("k_values", cfg.sweep.k_values);
      r.text("system", system);
      r.text("renormalization", renorm);
      r.real("p_scale", cfg.sweep.p_scale);
      r.real("direction", cfg.sweep.direction);
      r.finish();
      cfg.sweep.system = parse_system(system);
      cfg.sweep.renormalization = parse_renorm(renorm);
      if (cfg.sweep.k_values.empty()) cfg.sweep.k_values = {cfg.model.k};
      for (double k : cfg.sweep.k_values) {
        if (!(k >= 0.0)) throw ConfigError("[sweep] k_values must be >= 0");
      }
      break;
    }
    case ExperimentKind::StrobeMap: {
      SectionReader r("strobe", section("strobe"));
      r.real("bandwidth", cfg.strobe.bandwidth);
      r.list("levels", cfg.strobe.levels);
      r.count("classical_periods", cfg.strobe.classical_periods);
      r.count("kde_n", cfg.strobe.kde_n);
      r.finish();
      if (cfg.strobe.kde_n < 2) throw ConfigError("[strobe] kde_n must be >= 2");
      break;
    }
    case ExperimentKind::IsolatedDecay: {
      SectionReader r("decay", section("decay"));
      std::string renorm = "tangent";
      r.real("fit_t_min", cfg.decay.fit_t_min);
      r.real("fit_t_max", cfg.decay.fit_t_max);
      r.text("renormalization", renorm);
      r.count("classical_walkers", cfg.decay.classical_walkers);
      r.finish();
      cfg.decay.renormalization = parse_renorm(renorm);
      if (!(cfg.decay.fit_t_max > cfg.decay.fit_t_min) || !(cfg.decay.fit_t_min > 0.0)) {
        throw ConfigError("[decay] need 0 < fit_t_min < fit_t_max");
      }
      if (cfg.model.k != 0.0) throw ConfigError("[decay] isolated decay requires k = 0");
      break;
    }
  }
  const bool needs_hbar = cfg.kind != ExperimentKind::LyapunovSweep || cfg.sweep.system == LyapunovSystem::Quantum;
  if (needs_hbar && !(cfg.model.hbar > 0.0)) throw ConfigError("[model] hbar must be > 0 for " + to_string(cfg.kind));
  return cfg;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  return config_from_sections(parse_ini(in, source));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

IniSections ExperimentConfig::resolved() const {
  IniSections s;
  s["experiment"] = {{"name", to_string(kind)}, {"out", out_dir}};
  s["model"] = {{"mass", fmt(model.mass)},
                {"hbar", fmt(model.hbar)},
                {"k", fmt(model.k)},
                {"D", fmt(model.D)},
                {"coeffs", fmt_list(model.potential.coeffs())},
                {"drive_amp", fmt(model.potential.drive_amp())},
                {"drive_omega", fmt(model.potential.drive_omega())},
                {"x_min", fmt(grid.x_min)},
                {"x_max", fmt(grid.x_max)},
                {"n", std::to_string(grid.n)},
                {"p_min", fmt(grid.p_min)},
                {"p_max", fmt(grid.p_max)},
                {"n_p", std::to_string(grid.n_p)}};
  s["initial"] = {{"x0", fmt(initial.x0)}, {"p0", fmt(initial.p0)}, {"sigma_x", fmt(initial.sigma_x)}};
  s["numerics"] = {{"steps_per_period", std::to_string(numerics.steps_per_period)},
                   {"t_total", fmt(numerics.t_total)},
                   {"ensemble_n", std::to_string(numerics.ensemble_n)},
                   {"base_seed", std::to_string(numerics.base_seed)},
                   {"tau_r", fmt(numerics.tau_r)},
                   {"delta0", fmt(numerics.delta0)},
                   {"check_every", std::to_string(numerics.check_every)},
                   {"record_every", std::to_string(numerics.record_every)},
                   {"workers", std::to_string(numerics.workers)}};
  switch (kind) {
    case ExperimentKind::StrongQct:
      s["strong"] = {{"window", fmt(strong.window)},
                     {"tolerance", fmt(strong.tolerance)},
                     {"action_convention", strong.action_convention},
                     {"action_s", fmt(strong.action_s)},
                     {"sqrt_vx_bound", fmt(strong.sqrt_vx_bound)},
                     {"orbit_periods", std::to_string(strong.orbit_periods)}};
      break;
    case ExperimentKind::WeakQct:
      s["weak"] = {{"D_values", fmt_list(weak.d_values)},
                   {"area", fmt(weak.area)},
                   {"u0", fmt(weak.u0)},
                   {"orbit_periods", std::to_string(weak.orbit_periods)},
                   {"snapshot_every", std::to_string(weak.snapshot_every)}};
      break;
    case ExperimentKind::LyapunovSweep:
      s["sweep"] = {{"k_values", fmt_list(sweep.k_values)},
                    {"system", to_string(sweep.system)},
                    {"renormalization", to_string(sweep.renormalization)},
                    {"p_scale", fmt(sweep.p_scale)},
                    {"direction", fmt(sweep.direction)}};
      break;
    case ExperimentKind::StrobeMap:
      s["strobe"] = {{"bandwidth", fmt(strobe.bandwidth)},
                     {"levels", fmt_list(strobe.levels)},
                     {"classical_periods", std::to_string(strobe.classical_periods)},
                     {"kde_n", std::to_string(strobe.kde_n)}};
      break;
    case ExperimentKind::IsolatedDecay:
      s["decay"] = {{"fit_t_min", fmt(decay.fit_t_min)},
                    {"fit_t_max", fmt(decay.fit_t_max)},
                    {"renormalization", to_string(decay.renormalization)},
                    {"classical_walkers", std::to_string(decay.classical_walkers)}};
      break;
  }
  return s;
}

}  // namespace qchaos
