#include "mfg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mfg {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string s = "config validation failed:";
  for (const auto& it : items) s += "\n  - " + it;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> items)
    : std::runtime_error(join(items)), items_(std::move(items)) {}

namespace {

class Reader {
 public:
  Reader(const json& root, std::string origin) : origin_(std::move(origin)) {
    stack_.push_back(&root);
    paths_.push_back("");
  }

  void enter(const char* key) {
    const json* cur = stack_.back();
    const auto it = cur->find(key);
    if (it == cur->end() || !it->is_object()) {
      stack_.push_back(nullptr);
    } else {
      stack_.push_back(&*it);
    }
    paths_.push_back(paths_.back().empty() ? key : paths_.back() + "." + key);
    known_.emplace_back();
  }

  void leave() {
    const json* cur = stack_.back();
    if (cur) {
      for (auto it = cur->begin(); it != cur->end(); ++it) {
        bool ok = false;
        for (const auto& k : known_.back())
          if (k == it.key()) ok = true;
        if (!ok) errors.push_back("unknown key '" + paths_.back() + "." + it.key() + "'");
      }
    }
    stack_.pop_back();
    paths_.pop_back();
    known_.pop_back();
  }

  void mark_section(const char* key) { top_known_.push_back(key); }

  void finish_top(const json& root) {
    for (auto it = root.begin(); it != root.end(); ++it) {
      bool ok = false;
      for (const auto& k : top_known_)
        if (k == it.key()) ok = true;
      if (!ok) errors.push_back("unknown key '" + it.key() + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    if (!known_.empty()) known_.back().push_back(key);
    const json* cur = stack_.back();
    if (!cur) return;
    const auto it = cur->find(key);
    if (it == cur->end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      errors.push_back("field '" + paths_.back() + "." + key + "' has the wrong type");
    }
  }

  bool section_is_object(const json& root, const char* key) {
    const auto it = root.find(key);
    if (it == root.end()) return true;
    if (!it->is_object()) {
      errors.push_back("section '" + std::string(key) + "' must be an object");
      return false;
    }
    return true;
  }

  std::vector<std::string> errors;

 private:
  std::vector<const json*> stack_;
  std::vector<std::string> paths_;
  std::vector<std::vector<std::string>> known_;
  std::vector<std::string> top_known_;
  std::string origin_;
};

void range_check(const RunConfig& c, std::vector<std::string>& errors) {
  auto bad = [&errors](const std::string& msg) { errors.push_back(msg); };
  if (c.grid_dim != 1 && c.grid_dim != 2) bad("grid.dim must be 1 or 2");
  if (c.grid_n < 2) bad("grid.n must be >= 2");
  if (c.family != "power" && c.family != "congestion" && c.family != "weak")
    bad("hamiltonian.family must be power, congestion, or weak");
  if (!(c.alpha > 1.0)) bad("hamiltonian.alpha must be > 1");
  if (!(c.beta > 0.0)) bad("hamiltonian.beta must be > 0");
  if (!(c.tau >= 0.0 && c.tau <= 1.0)) bad("hamiltonian.tau must lie in [0,1]");
  if (c.family != "congestion" && c.tau != 0.0)
    bad("hamiltonian.tau is only meaningful for the congestion family");
  if (c.h_kernel != "exp" && c.h_kernel != "cosh")
    bad("hamiltonian.h_kernel must be exp or cosh");
  if (!(c.eps0 > 0.0 && c.eps0 <= 1.0)) bad("schedule.eps0 must lie in (0,1]");
  if (!(c.ratio > 0.0 && c.ratio < 1.0)) bad("schedule.ratio must lie in (0,1)");
  if (c.stages < 1) bad("schedule.stages must be >= 1");
  for (const auto& [v, name] :
       {std::pair<double, const char*>{c.tol_hj_pos, "schedule.tol_hj_pos"},
        {c.tol_hj_support, "schedule.tol_hj_support"},
        {c.tol_transport_l1, "schedule.tol_transport_l1"},
        {c.tol_mass_gap, "schedule.tol_mass_gap"},
        {c.tol_weak_certificate, "schedule.tol_weak_certificate"}}) {
    if (!(v > 0.0)) bad(std::string(name) + " must be > 0");
  }
  if (!(c.congestion_floor_min > 0.0)) bad("schedule.congestion_floor_min must be > 0");
  if (!(c.step0 > 0.0)) bad("solver.step0 must be > 0");
  if (!(c.backtrack_ratio > 0.0 && c.backtrack_ratio < 1.0))
    bad("solver.backtrack_ratio must lie in (0,1)");
  if (c.max_iter < 1) bad("solver.max_iter must be >= 1");
  if (!(c.tol_natural > 0.0)) bad("solver.tol_natural must be > 0");
  if (c.m_floor < 0.0) bad("solver.m_floor must be >= 0");
}

}  // namespace

RunConfig parse_config_json(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError({origin + ": not valid JSON (" + e.what() + ")"});
  }
  if (!root.is_object()) throw ConfigError({origin + ": top level must be an object"});

  RunConfig c;
  Reader r(root, origin);

  r.mark_section("grid");
  if (r.section_is_object(root, "grid")) {
    r.enter("grid");
    r.get("dim", c.grid_dim);
    r.get("n", c.grid_n);
    r.leave();
  }

  r.mark_section("hamiltonian");
  if (r.section_is_object(root, "hamiltonian")) {
    r.enter("hamiltonian");
    r.get("family", c.family);
    r.get("alpha", c.alpha);
    r.get("beta", c.beta);
    r.get("tau", c.tau);
    r.get("a", c.a_profile);
    r.get("b", c.b_profile);
    r.get("g", c.g_profile);
    r.get("h_kernel", c.h_kernel);
    r.leave();
  }

  r.mark_section("potential");
  {
    const auto it = root.find("potential");
    if (it != root.end()) {
      if (it->is_string())
        c.potential = it->get<std::string>();
      else
        r.errors.push_back("field 'potential' must be a profile string");
    }
  }

  r.mark_section("schedule");
  if (r.section_is_object(root, "schedule")) {
    r.enter("schedule");
    r.get("eps0", c.eps0);
    r.get("ratio", c.ratio);
    r.get("stages", c.stages);
    r.get("tol_hj_pos", c.tol_hj_pos);
    r.get("tol_hj_support", c.tol_hj_support);
    r.get("tol_transport_l1", c.tol_transport_l1);
    r.get("tol_mass_gap", c.tol_mass_gap);
    r.get("tol_weak_certificate", c.tol_weak_certificate);
    r.get("congestion_floor_min", c.congestion_floor_min);
    r.get("warm_start", c.warm_start);
    r.leave();
  }

  r.mark_section("solver");
  if (r.section_is_object(root, "solver")) {
    r.enter("solver");
    r.get("step0", c.step0);
    r.get("backtrack_ratio", c.backtrack_ratio);
    r.get("max_iter", c.max_iter);
    r.get("tol_natural", c.tol_natural);
    r.get("m_floor", c.m_floor);
    r.leave();
  }

  r.mark_section("use_envelope");
  r.mark_section("output_dir");
  r.mark_section("seed");
  {
    const auto it = root.find("use_envelope");
    if (it != root.end()) {
      if (it->is_boolean())
        c.use_envelope = it->get<bool>();
      else
        r.errors.push_back("field 'use_envelope' must be a boolean");
    }
    const auto ot = root.find("output_dir");
    if (ot != root.end()) {
      if (ot->is_string())
        c.output_dir = ot->get<std::string>();
      else
        r.errors.push_back("field 'output_dir' must be a string");
    }
    const auto st = root.find("seed");
    if (st != root.end()) {
      if (st->is_number_unsigned() || st->is_number_integer())
        c.seed = st->get<uint64_t>();
      else
        r.errors.push_back("field 'seed' must be a non-negative integer");
    }
  }

  r.finish_top(root);
  range_check(c, r.errors);

  // Profiles get a parse-only dry run so profile typos are reported with the
  // rest of the errors.
  const TorusGrid probe = TorusGrid::make(c.grid_dim >= 1 && c.grid_dim <= 2 ? c.grid_dim : 1,
                                          c.grid_n >= 2 ? c.grid_n : 2);
  for (const auto& [prof, name] :
       {std::pair<std::string, const char*>{c.a_profile, "hamiltonian.a"},
        {c.b_profile, "hamiltonian.b"},
        {c.g_profile, "hamiltonian.g"},
        {c.potential, "potential"}}) {
    try {
      parse_profile(prof, probe);
    } catch (const std::exception& e) {
      r.errors.push_back(std::string(name) + ": " + e.what());
    }
  }

  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError({"cannot open config file: " + path});
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_json(ss.str(), path);
}

std::string save_config_json(const RunConfig& c) {
  json root;
  root["grid"] = {{"dim", c.grid_dim}, {"n", c.grid_n}};
  root["hamiltonian"] = {{"family", c.family}, {"alpha", c.alpha},
                         {"beta", c.beta},     {"tau", c.tau},
                         {"a", c.a_profile},   {"b", c.b_profile},
                         {"g", c.g_profile},   {"h_kernel", c.h_kernel}};
  root["potential"] = c.potential;
  root["schedule"] = {{"eps0", c.eps0},
                      {"ratio", c.ratio},
                      {"stages", c.stages},
                      {"tol_hj_pos", c.tol_hj_pos},
                      {"tol_hj_support", c.tol_hj_support},
                      {"tol_transport_l1", c.tol_transport_l1},
                      {"tol_mass_gap", c.tol_mass_gap},
                      {"tol_weak_certificate", c.tol_weak_certificate},
                      {"congestion_floor_min", c.congestion_floor_min},
                      {"warm_start", c.warm_start}};
  root["solver"] = {{"step0", c.step0},
                    {"backtrack_ratio", c.backtrack_ratio},
                    {"max_iter", c.max_iter},
                    {"tol_natural", c.tol_natural},
                    {"m_floor", c.m_floor}};
  root["use_envelope"] = c.use_envelope;
  root["output_dir"] = c.output_dir;
  root["seed"] = c.seed;
  return root.dump(2);
}

ScalarField parse_profile(const std::string& profile, const TorusGrid& grid) {
  const auto colon = profile.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("profile '" + profile + "' lacks a ':' separator");
  const std::string kind = profile.substr(0, colon);
  const std::string args = profile.substr(colon + 1);
  auto parse_numbers = [&](size_t want) {
    std::vector<double> out;
    std::stringstream ss(args);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      size_t used = 0;
      double v;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("profile '" + profile + "': bad number '" + tok + "'");
      }
      if (used != tok.size())
        throw std::invalid_argument("profile '" + profile + "': bad number '" + tok + "'");
      out.push_back(v);
    }
    if (out.size() != want)
      throw std::invalid_argument("profile '" + profile + "': expected " +
                                  std::to_string(want) + " parameters");
    return out;
  };

  ScalarField f(grid);
  if (kind == "const") {
    const auto v = parse_numbers(1);
    for (int x = 0; x < grid.node_count; ++x) f[x] = v[0];
  } else if (kind == "sin1") {
    const auto v = parse_numbers(2);
    for (int x = 0; x < grid.node_count; ++x) {
      f[x] = v[0] + v[1] * std::sin(2.0 * M_PI * grid.position(x)[0]);
    }
  } else {
    throw std::invalid_argument("unknown profile kind '" + kind + "' (use const or sin1)");
  }
  return f;
}

BuiltProblem build_problem(const RunConfig& cfg) {
  const TorusGrid grid = TorusGrid::make(cfg.grid_dim, cfg.grid_n);

  HamiltonianSpec spec;
  spec.alpha = cfg.alpha;
  spec.beta = cfg.beta;
  spec.a = parse_profile(cfg.a_profile, grid);
  spec.b = parse_profile(cfg.b_profile, grid);
  if (cfg.family == "power") {
    spec.family = Family::Power;
  } else if (cfg.family == "congestion") {
    spec.family = Family::Congestion;
    spec.tau = cfg.tau;
  } else {
    spec.family = Family::Weak;
    spec.g = parse_profile(cfg.g_profile, grid);
    spec.kernel = cfg.h_kernel == "exp" ? WeakKernel::ExpSquare : WeakKernel::CoshRadial;
  }
  spec.validate_ranges();

  ContinuationSchedule sched;
  sched.eps0 = cfg.eps0;
  sched.ratio = cfg.ratio;
  sched.stages = cfg.stages;
  sched.congestion_floor_min = cfg.congestion_floor_min;
  sched.warm_start = cfg.warm_start;
  sched.tols.hj_pos = cfg.tol_hj_pos;
  sched.tols.hj_support = cfg.tol_hj_support;
  sched.tols.transport_l1 = cfg.tol_transport_l1;
  sched.tols.mass_gap = cfg.tol_mass_gap;
  sched.tols.weak_certificate = cfg.tol_weak_certificate;
  sched.validate();

  SolverConfig solver;
  solver.step0 = cfg.step0;
  solver.backtrack_ratio = cfg.backtrack_ratio;
  solver.max_iter = cfg.max_iter;
  solver.tol_natural = cfg.tol_natural;
  solver.m_floor = cfg.m_floor;
  solver.rng_seed = cfg.seed;
  solver.validate();

  BuiltProblem built{grid,
                     ProblemData{},
                     sched,
                     solver};
  built.data.grid = grid;
  built.data.spec = std::move(spec);
  built.data.V = parse_profile(cfg.potential, grid);
  built.data.exponents = ExponentSet::from(cfg.alpha, cfg.beta);
  built.data.epsilon = cfg.eps0;
  built.data.use_envelope = cfg.use_envelope || built.data.spec.family == Family::Weak;
  built.data.m_floor =
      sched.floor_for(built.data.spec.family, cfg.eps0);
  return built;
}

}  // namespace mfg
