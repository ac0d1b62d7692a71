#include "subfp/config.hpp"

#include "subfp/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

namespace subfp {

namespace {

using Slot = std::variant<double*, int*, unsigned*, bool*, std::string*>;

struct Binding {
  const char* key;
  Slot slot;
};

template <class Cfg>
std::vector<Binding> bindings(Cfg& c) {
  return {
      {"field.kind", &c.field_kind},        {"field.gamma", &c.gamma},
      {"field.scale", &c.scale},            {"field.amplitude", &c.amplitude},
      {"field.modulation", &c.modulation},  {"field.R0", &c.R0},
      {"field.F1", &c.F1},                  {"field.F2", &c.F2},
      {"grid.dim", &c.dim},                 {"grid.L", &c.L},
      {"grid.n", &c.n},                     {"norm.p", &c.p},
      {"norm.family", &c.family},           {"norm.k", &c.k},
      {"norm.kappa", &c.kappa},             {"norm.s", &c.s},
      {"norm.theta", &c.theta},             {"initial.kind", &c.initial_kind},
      {"initial.center", &c.center},        {"initial.center_y", &c.center_y},
      {"initial.width", &c.width},          {"initial.exponent", &c.exponent},
      {"initial.path", &c.initial_path},    {"initial.mean_zero", &c.mean_zero},
      {"time.first", &c.t_first},           {"time.end", &c.t_end},
      {"time.ratio", &c.t_ratio},           {"time.dt", &c.dt},
      {"fit.envelope", &c.envelope},        {"fit.norm", &c.fit_norm},
      {"fit.sigma", &c.sigma},              {"fit.burn_fraction", &c.burn_fraction},
      {"fit.beta_factor", &c.beta_factor},  {"fit.min_r2", &c.min_r2},
      {"spectrum.count", &c.spectrum_count}, {"splitting.a_factor", &c.a_factor},
      {"splitting.scan_radius", &c.scan_radius}, {"splitting.scan_points", &c.scan_points},
      {"lyapunov.kappa", &c.lyap_kappa},    {"lyapunov.zeta0", &c.lyap_zeta0},
      {"lyapunov.M", &c.lyap_M},            {"lyapunov.R", &c.lyap_R},
      {"output", &c.output},                {"seed", &c.seed},
  };
}

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Strip a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
      continue;
    }
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string parse_string(const std::string& key, const std::string& v) {
  if (v.size() < 2 || v.front() != '"' || v.back() != '"')
    throw ConfigError(key, "expected a quoted string, got " + v);
  std::string out;
  for (size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] == '\\') {
      if (i + 2 >= v.size()) throw ConfigError(key, "dangling escape");
      const char c = v[++i];
      if (c == 'n') out += '\n';
      else if (c == 't') out += '\t';
      else out += c;
    } else if (v[i] == '"') {
      throw ConfigError(key, "unescaped quote in string");
    } else {
      out += v[i];
    }
  }
  return out;
}

double parse_number(const std::string& key, const std::string& v) {
  std::string t;
  for (char c : v)
    if (c != '_') t += c;
  if (t == "inf" || t == "+inf") return INFINITY;
  size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got " + v);
  }
  if (used != t.size()) throw ConfigError(key, "expected a number, got " + v);
  return x;
}

long long parse_integer(const std::string& key, const std::string& v) {
  const double x = parse_number(key, v);
  if (std::floor(x) != x || std::abs(x) > 9e15) throw ConfigError(key, "expected an integer, got " + v);
  return static_cast<long long>(x);
}

std::vector<std::string> parse_string_array(const std::string& key, const std::string& v) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ConfigError(key, "expected an array of strings");
  std::vector<std::string> out;
  std::string body = trim(v.substr(1, v.size() - 2));
  size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && (std::isspace(static_cast<unsigned char>(body[i])) || body[i] == ',')) ++i;
    if (i >= body.size()) break;
    if (body[i] != '"') throw ConfigError(key, "array entries must be quoted strings");
    size_t j = i + 1;
    while (j < body.size() && body[j] != '"') j += body[j] == '\\' ? 2 : 1;
    if (j >= body.size()) throw ConfigError(key, "unterminated string in array");
    out.push_back(parse_string(key, body.substr(i, j - i + 1)));
    i = j + 1;
  }
  return out;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // keep a float marker so the value reads back as a float in TOML
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

const std::vector<std::string>& known_tasks() {
  static const std::vector<std::string> t{"steady",   "spectrum",  "decay-fit",
                                          "poincare", "splitting-scan", "lyapunov",
                                          "nash",     "entropy",   "interpolation"};
  return t;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  auto table = bindings(cfg);
  std::istringstream in(text);
  std::string raw;
  std::vector<std::string> seen;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      throw ConfigError(key, "duplicate key");
    seen.push_back(key);

    if (key == "tasks") {
      cfg.tasks = parse_string_array(key, val);
      continue;
    }
    auto it = std::find_if(table.begin(), table.end(), [&](const Binding& b) { return key == b.key; });
    if (it == table.end()) throw ConfigError(key, "unknown key");
    std::visit(
        [&](auto* slot) {
          using T = std::remove_pointer_t<decltype(slot)>;
          if constexpr (std::is_same_v<T, double>) {
            *slot = parse_number(key, val);
          } else if constexpr (std::is_same_v<T, int>) {
            *slot = static_cast<int>(parse_integer(key, val));
          } else if constexpr (std::is_same_v<T, unsigned>) {
            const long long x = parse_integer(key, val);
            if (x < 0) throw ConfigError(key, "must be nonnegative");
            *slot = static_cast<unsigned>(x);
          } else if constexpr (std::is_same_v<T, bool>) {
            if (val == "true") *slot = true;
            else if (val == "false") *slot = false;
            else throw ConfigError(key, "expected true or false");
          } else {
            *slot = parse_string(key, val);
          }
        },
        it->slot);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("file", "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  std::ostringstream out;
  for (const Binding& b : bindings(cfg)) {
    out << b.key << " = ";
    std::visit(
        [&](auto* slot) {
          using T = std::remove_pointer_t<decltype(slot)>;
          if constexpr (std::is_same_v<T, double>) out << format_double(*slot);
          else if constexpr (std::is_same_v<T, bool>) out << (*slot ? "true" : "false");
          else if constexpr (std::is_same_v<T, std::string>) out << quote(*slot);
          else out << *slot;
        },
        b.slot);
    out << '\n';
  }
  out << "tasks = [";
  for (size_t i = 0; i < cfg.tasks.size(); ++i) out << (i ? ", " : "") << quote(cfg.tasks[i]);
  out << "]\n";
  return out.str();
}

void validate_config(const ExperimentConfig& c) {
  auto require = [](bool ok, const char* field, const std::string& why) {
    if (!ok) throw ConfigError(field, why);
  };
  require(c.field_kind == "canonical" || c.field_kind == "rotated" || c.field_kind == "custom",
          "field.kind", "must be canonical, rotated or custom");
  require(c.gamma > 0.0 && c.gamma < 1.0, "field.gamma", "must lie in (0,1)");
  require(c.scale > 0.0, "field.scale", "must be positive");
  require(c.R0 > 0.0, "field.R0", "must be positive");
  require(c.dim == 1 || c.dim == 2, "grid.dim", "must be 1 or 2");
  require(c.L > 0.0, "grid.L", "must be positive");
  require(c.n >= 8, "grid.n", "must be at least 8");
  require(c.field_kind != "rotated" || c.dim == 2, "field.kind", "rotated fields need grid.dim = 2");
  require(std::isfinite(c.amplitude), "field.amplitude", "must be finite");
  require(std::isfinite(c.modulation), "field.modulation", "must be finite");
  if (c.field_kind == "custom") {
    require(!c.F1.empty(), "field.F1", "custom fields need an expression");
    require(c.dim == 1 || !c.F2.empty(), "field.F2", "custom 2D fields need an expression");
    try {
      Expression e(c.F1);
    } catch (const std::exception& e) {
      throw ConfigError("field.F1", e.what());
    }
    if (c.dim == 2) {
      try {
        Expression e(c.F2);
      } catch (const std::exception& e) {
        throw ConfigError("field.F2", e.what());
      }
    }
  }
  require(c.p >= 1.0, "norm.p", "must be >= 1");
  require(c.family == "unit" || c.family == "polynomial" || c.family == "stretched" ||
              c.family == "critical",
          "norm.family", "must be unit, polynomial, stretched or critical");
  if (c.family == "polynomial") require(c.k > 0.0, "norm.k", "must be positive");
  if (c.family == "stretched") {
    require(c.kappa > 0.0, "norm.kappa", "must be positive");
    require(c.s > 0.0 && c.s < c.gamma, "norm.s", "must lie in (0, gamma)");
  }
  if (c.family == "critical")
    require(c.kappa > 0.0 && c.kappa * c.gamma < 1.0, "norm.kappa", "must lie in (0, 1/gamma)");
  require(c.theta >= 0.0 && c.theta <= 1.0, "norm.theta", "must lie in [0,1]");
  require(c.initial_kind == "bump" || c.initial_kind == "heavy-tail" || c.initial_kind == "delta" ||
              c.initial_kind == "csv",
          "initial.kind", "must be bump, heavy-tail, delta or csv");
  require(c.width > 0.0, "initial.width", "must be positive");
  require(c.initial_kind != "heavy-tail" || c.exponent > c.dim, "initial.exponent",
          "must exceed the dimension for an integrable tail");
  require(c.initial_kind != "csv" || !c.initial_path.empty(), "initial.path",
          "csv initial data need a path");
  require(c.t_first > 0.0, "time.first", "must be positive");
  require(c.t_end >= c.t_first, "time.end", "must be >= time.first");
  require(c.t_ratio > 1.0, "time.ratio", "must exceed 1");
  require(c.dt > 0.0, "time.dt", "must be positive");
  require(c.envelope == "stretched" || c.envelope == "polynomial", "fit.envelope",
          "must be stretched or polynomial");
  require(c.fit_norm == "G" || c.fit_norm == "spec", "fit.norm", "must be G or spec");
  require(c.sigma >= 0.0 && c.sigma < 1.0, "fit.sigma", "must lie in [0,1)");
  require(c.burn_fraction > 0.0 && c.burn_fraction < 1.0, "fit.burn_fraction", "must lie in (0,1)");
  require(c.beta_factor > 0.0 && c.beta_factor <= 1.0, "fit.beta_factor", "must lie in (0,1]");
  require(c.min_r2 >= 0.0 && c.min_r2 <= 1.0, "fit.min_r2", "must lie in [0,1]");
  require(c.spectrum_count >= 2, "spectrum.count", "must be at least 2");
  require(c.a_factor > 0.0, "splitting.a_factor", "must be positive");
  require(c.scan_radius > 1.0, "splitting.scan_radius", "must exceed 1");
  require(c.scan_points >= 16, "splitting.scan_points", "must be at least 16");
  require(c.lyap_kappa > 0.0 && c.lyap_kappa * c.gamma < 1.0, "lyapunov.kappa",
          "must lie in (0, 1/gamma)");
  require(c.lyap_zeta0 >= 0.0, "lyapunov.zeta0", "must be >= 0");
  require(c.lyap_M >= 0.0, "lyapunov.M", "must be >= 0");
  require(c.lyap_R > 0.0, "lyapunov.R", "must be positive");
  require(!c.tasks.empty(), "tasks", "must list at least one task");
  for (const std::string& t : c.tasks)
    require(std::find(known_tasks().begin(), known_tasks().end(), t) != known_tasks().end(), "tasks",
            "unknown task " + t);
  if (std::find(c.tasks.begin(), c.tasks.end(), "splitting-scan") != c.tasks.end())
    require(std::isfinite(c.p), "norm.p", "splitting-scan needs a finite p");
}

ForceField build_field(const ExperimentConfig& c) {
  if (c.field_kind == "custom")
    return custom_field(c.dim, c.gamma, Expression(c.F1), c.dim == 2 ? Expression(c.F2) : Expression(),
                        c.R0);
  ForceField base = canonical_gradient_field(c.gamma, c.scale, c.dim, c.R0);
  if (c.field_kind == "canonical") return base;
  return rotated_field(base, c.amplitude, c.modulation != 0.0 ? linear_modulation(c.modulation) : ScalarMap{});
}

Weight build_weight(const ExperimentConfig& c) {
  if (c.family == "polynomial") return Weight::polynomial(c.k, c.gamma);
  if (c.family == "stretched") return Weight::stretched(c.kappa, c.s, c.gamma);
  if (c.family == "critical") return Weight::critical(c.kappa, c.gamma);
  return Weight::unit();
}

NormSpec build_norm(const ExperimentConfig& c) { return NormSpec(c.p, build_weight(c), c.theta); }

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace subfp
