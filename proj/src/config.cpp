#include "phasenet/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace phasenet {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = trim(text);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const std::string t = trim(text);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + text + "'");
}

Point parse_point(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  std::string a, b, rest;
  if (!(is >> a >> b) || (is >> rest)) {
    throw ConfigError("key '" + key + "': expected two numbers 'x y', got '" + text + "'");
  }
  return {parse_double(key, a), parse_double(key, b)};
}

std::vector<Point> parse_points(const std::string& key, const std::string& text) {
  std::vector<Point> pts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (trim(item).empty()) continue;
    pts.push_back(parse_point(key, item));
  }
  return pts;
}

std::string point_text(Point p) { return fmt(p.x) + " " + fmt(p.y); }

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Keys in canonical order, "section.name".
const std::vector<std::pair<std::string, Key>>& key_table() {
  static const std::vector<std::pair<std::string, Key>> table = [] {
    std::vector<std::pair<std::string, Key>> t;
    auto real = [&t](const std::string& name, double RunConfig::*field) {
      t.push_back({name,
                   {[name, field](RunConfig& c, const std::string& v) {
                      c.*field = parse_double(name, v);
                    },
                    [field](const RunConfig& c) { return fmt(c.*field); }}});
    };
    auto real_ref = [&t](const std::string& name, std::function<double&(RunConfig&)> ref) {
      t.push_back({name,
                   {[name, ref](RunConfig& c, const std::string& v) {
                      ref(c) = parse_double(name, v);
                    },
                    [ref](const RunConfig& c) {
                      return fmt(ref(const_cast<RunConfig&>(c)));
                    }}});
    };
    auto integer = [&t](const std::string& name, std::function<int&(RunConfig&)> ref) {
      t.push_back({name,
                   {[name, ref](RunConfig& c, const std::string& v) {
                      ref(c) = static_cast<int>(parse_int(name, v));
                    },
                    [ref](const RunConfig& c) {
                      return std::to_string(ref(const_cast<RunConfig&>(c)));
                    }}});
    };

    real("grid.width", &RunConfig::width);
    real("grid.height", &RunConfig::height);
    real("grid.h", &RunConfig::h);
    real_ref("grid.origin_x", [](RunConfig& c) -> double& { return c.origin.x; });
    real_ref("grid.origin_y", [](RunConfig& c) -> double& { return c.origin.y; });

    t.push_back({"problem.mode",
                 {[](RunConfig& c, const std::string& v) {
                    const std::string m = trim(v);
                    if (m == "compliance") c.problem.mode = Mode::kCompliance;
                    else if (m == "steiner") c.problem.mode = Mode::kSteiner;
                    else throw ConfigError("key 'problem.mode': expected compliance or steiner, got '" + v + "'");
                  },
                  [](const RunConfig& c) { return std::string(to_string(c.problem.mode)); }}});
    real_ref("problem.lambda", [](RunConfig& c) -> double& { return c.problem.lambda; });
    real_ref("problem.f", [](RunConfig& c) -> double& { return c.problem.f_const; });
    real_ref("problem.q", [](RunConfig& c) -> double& { return c.problem.q; });
    t.push_back({"problem.source",
                 {[](RunConfig& c, const std::string& v) {
                    c.problem.source = parse_point("problem.source", v);
                  },
                  [](const RunConfig& c) { return point_text(c.problem.source); }}});
    t.push_back({"problem.terminals",
                 {[](RunConfig& c, const std::string& v) {
                    c.problem.terminals = parse_points("problem.terminals", v);
                  },
                  [](const RunConfig& c) {
                    std::string s;
                    for (std::size_t k = 0; k < c.problem.terminals.size(); ++k) {
                      if (k) s += "; ";
                      s += point_text(c.problem.terminals[k]);
                    }
                    return s;
                  }}});
    real_ref("problem.eta", [](RunConfig& c) -> double& { return c.optimizer.eta_override; });
    real_ref("problem.c_eps", [](RunConfig& c) -> double& { return c.optimizer.c_eps_override; });

    real("schedule.eps0", &RunConfig::eps0);
    real("schedule.rho", &RunConfig::rho);
    real("schedule.eps_final", &RunConfig::eps_final);
    real("schedule.delta", &RunConfig::delta);
    t.push_back({"schedule.delta_relative",
                 {[](RunConfig& c, const std::string& v) {
                    c.delta_relative = parse_bool("schedule.delta_relative", v);
                  },
                  [](const RunConfig& c) { return std::string(c.delta_relative ? "true" : "false"); }}});

    integer("optimizer.max_outer", [](RunConfig& c) -> int& { return c.optimizer.max_outer; });
    real_ref("cg.grad_tol", [](RunConfig& c) -> double& { return c.optimizer.cg.grad_tol; });
    integer("cg.max_iters", [](RunConfig& c) -> int& { return c.optimizer.cg.max_iters; });
    integer("cg.restart_period", [](RunConfig& c) -> int& { return c.optimizer.cg.restart_period; });
    integer("spg.memory", [](RunConfig& c) -> int& { return c.optimizer.spg.memory; });
    real_ref("spg.alpha_min", [](RunConfig& c) -> double& { return c.optimizer.spg.alpha_min; });
    real_ref("spg.alpha_max", [](RunConfig& c) -> double& { return c.optimizer.spg.alpha_max; });
    real_ref("spg.gamma", [](RunConfig& c) -> double& { return c.optimizer.spg.gamma; });
    real_ref("spg.sigma1", [](RunConfig& c) -> double& { return c.optimizer.spg.sigma1; });
    real_ref("spg.sigma2", [](RunConfig& c) -> double& { return c.optimizer.spg.sigma2; });
    integer("spg.max_iters", [](RunConfig& c) -> int& { return c.optimizer.spg.max_iters; });
    real_ref("spg.pg_tol", [](RunConfig& c) -> double& { return c.optimizer.spg.pg_tol; });

    t.push_back({"output.dir",
                 {[](RunConfig& c, const std::string& v) { c.output_dir = trim(v); },
                  [](const RunConfig& c) { return c.output_dir; }}});
    t.push_back({"output.seed",
                 {[](RunConfig& c, const std::string& v) {
                    const long long s = parse_int("output.seed", v);
                    if (s < 0) throw ConfigError("key 'output.seed': must be >= 0");
                    c.seed = static_cast<std::uint64_t>(s);
                  },
                  [](const RunConfig& c) { return std::to_string(c.seed); }}});
    integer("output.snapshot_every", [](RunConfig& c) -> int& { return c.snapshot_every; });
    return t;
  }();
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& [k, v] : key_table())
    if (k == name) return &v;
  return nullptr;
}

}  // namespace

RunConfig::RunConfig() {
  problem.mode = Mode::kCompliance;
  problem.lambda = 20.0;
  problem.source = {0.25, 0.5};
}

GridSpec RunConfig::grid() const {
  try {
    const GridSpec g = GridSpec::covering(width, height, h);
    return GridSpec(g.nx(), g.ny(), h, origin);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

Schedule RunConfig::schedule() const {
  try {
    Schedule s = Schedule::geometric(eps0, rho, eps_final);
    s.delta = delta;
    s.delta_relative = delta_relative;
    s.validate();
    return s;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

void RunConfig::validate() const {
  const GridSpec g = grid();
  const Schedule s = schedule();
  ProblemConfig p = problem;
  if (p.mode == Mode::kSteiner) {
    if (p.terminals.empty()) throw ConfigError("problem.terminals: steiner mode needs at least one terminal");
    p.source = p.terminals.front();
  } else if (p.q != 2.0) {
    throw ConfigError("problem.q: compliance runs require q = 2");
  }
  p = config_at(p, s.eps_values.front(), optimizer);
  try {
    p.validate(g);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  if (optimizer.max_outer < 1) throw ConfigError("optimizer.max_outer must be >= 1");
  if (optimizer.cg.max_iters < 1 || !(optimizer.cg.grad_tol > 0.0) ||
      optimizer.cg.restart_period < 1) {
    throw ConfigError("cg: need grad_tol > 0, max_iters >= 1, restart_period >= 1");
  }
  const SPGParams& spg = optimizer.spg;
  if (spg.memory < 1 || spg.max_iters < 1 || !(spg.alpha_min > 0.0) ||
      !(spg.alpha_max > spg.alpha_min) || !(spg.gamma > 0.0 && spg.gamma < 1.0) ||
      !(spg.sigma1 > 0.0 && spg.sigma1 < spg.sigma2 && spg.sigma2 < 1.0) ||
      !(spg.pg_tol > 0.0)) {
    throw ConfigError("spg: parameters out of range");
  }
  if (optimizer.eta_override < 0.0 || optimizer.c_eps_override < 0.0) {
    throw ConfigError("problem.eta and problem.c_eps must be >= 0 (0 selects the default)");
  }
  if (snapshot_every < 1) throw ConfigError("output.snapshot_every must be >= 1");
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

RunConfig parse_config(const std::string& text) {
  static const std::set<std::string> sections{"grid", "problem", "schedule", "optimizer",
                                              "cg", "spg", "output"};
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!sections.count(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string name = section + "." + trim(t.substr(0, eq));
    const Key* key = find_key(name);
    if (!key) throw ConfigError(where + "unknown key '" + name + "'");
    if (!seen.insert(name).second) throw ConfigError(where + "duplicate key '" + name + "'");
    try {
      key->set(cfg, t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  if (cfg.problem.mode == Mode::kSteiner && !cfg.problem.terminals.empty()) {
    cfg.problem.source = cfg.problem.terminals.front();
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& [name, key] : key_table()) {
    const std::string sec = name.substr(0, name.find('.'));
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << '[' << sec << "]\n";
      section = sec;
    }
    os << name.substr(sec.size() + 1) << " = " << key.get(cfg) << '\n';
  }
  return os.str();
}

}  // namespace phasenet
