#include "dfrt/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "dfrt/errors.hpp"

namespace dfrt {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::string body = trim(value);
  if (!body.empty() && (body.front() == '{' || body.front() == '[') &&
      (body.back() == '}' || body.back() == ']')) {
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out << format_double(values[i]);
    } else {
      out << values[i];
    }
  }
  return out.str();
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& what) const {
    std::ostringstream msg;
    msg << source_ << ":" << line << ": " << what;
    throw ConfigError(msg.str());
  }

  double number(int line, const std::string& key, const std::string& text) const {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE ||
        !std::isfinite(v)) {
      fail(line, key + ": expected a finite number, got '" + t + "'");
    }
    return v;
  }

  int integer(int line, const std::string& key, const std::string& text) const {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE ||
        v > 1000000000L || v < -1000000000L) {
      fail(line, key + ": expected an integer, got '" + t + "'");
    }
    return static_cast<int>(v);
  }

  std::vector<double> numbers(int line, const std::string& key,
                              const std::string& text) const {
    std::vector<double> out;
    for (const auto& item : split_list(text)) out.push_back(number(line, key, item));
    if (out.empty()) fail(line, key + ": empty list");
    return out;
  }

  std::vector<int> integers(int line, const std::string& key,
                            const std::string& text) const {
    std::vector<int> out;
    for (const auto& item : split_list(text)) out.push_back(integer(line, key, item));
    if (out.empty()) fail(line, key + ": empty list");
    return out;
  }

  void assign(RunConfig& c, int line, const std::string& section,
              const std::string& key, const std::string& value) {
    const std::string name = section.empty() ? key : section + "." + key;
    if (!seen_.insert(name).second) fail(line, "duplicate key '" + name + "'");

    if (name == "mode" || name == "run.mode") {
      try {
        c.mode = parse_mode(value);
      } catch (const ConfigError& e) {
        fail(line, e.what());
      }
    } else if (name == "theta" || name == "thetas" || name == "run.theta" ||
               name == "run.thetas") {
      c.thetas = numbers(line, name, value);
    } else if (name == "lambda" || name == "lambdas" || name == "run.lambda" ||
               name == "run.lambdas" || name == "potential.lambda") {
      c.lambdas = numbers(line, name, value);
    } else if (name == "workers" || name == "run.workers") {
      c.workers = integer(line, name, value);
    } else if (name == "grid.x_min") {
      c.grid.x_min = number(line, name, value);
    } else if (name == "grid.x_max") {
      c.grid.x_max = number(line, name, value);
    } else if (name == "grid.box") {
      const double half = number(line, name, value);
      c.grid.x_min = -half;
      c.grid.x_max = half;
    } else if (name == "grid.points" || name == "grid.n") {
      c.grid.points = integers(line, name, value);
    } else if (name == "grid.order") {
      const int order = integer(line, name, value);
      c.scf.order = order;
      c.scf.exact.order = order;
      c.inversion.order = order;
    } else if (name == "potential.a") {
      c.potential.a = number(line, name, value);
    } else if (name == "potential.b") {
      c.potential.b = number(line, name, value);
    } else if (name == "potential.c") {
      c.potential.c = number(line, name, value);
    } else if (name == "potential.d") {
      c.potential.d = number(line, name, value);
    } else if (name == "scf.mixing") {
      c.scf.mixing = number(line, name, value);
    } else if (name == "scf.max_iter") {
      c.scf.max_iter = integer(line, name, value);
    } else if (name == "scf.tol") {
      c.scf.tol = number(line, name, value);
    } else if (name == "scf.eig_tol") {
      c.scf.eig_tol = number(line, name, value);
    } else if (name == "scf.hartree_scaling" || name == "hartree_scaling") {
      const std::string v = lower(trim(value));
      if (v == "scaled" || v == "scaled_kernel") {
        c.scf.hartree_scaling = HartreeScaling::kScaledKernel;
      } else if (v == "prefactor" || v == "coulomb_prefactor") {
        c.scf.hartree_scaling = HartreeScaling::kCoulombPrefactor;
      } else {
        fail(line, name + ": expected 'scaled' or 'prefactor', got '" + v + "'");
      }
    } else if (name == "solver.theta_step") {
      c.scf.exact.theta_step = number(line, name, value);
    } else if (name == "solver.stationarity_tol") {
      c.scf.exact.stationarity_tol = number(line, name, value);
    } else if (name == "solver.one_body_k") {
      c.scf.exact.one_body_k = integer(line, name, value);
    } else if (name == "solver.two_body_k") {
      c.scf.exact.two_body_k = integer(line, name, value);
    } else if (name == "solver.tol") {
      c.scf.exact.solver_tol = number(line, name, value);
    } else if (name == "solver.symmetry_tol") {
      c.scf.exact.symmetry_tol = number(line, name, value);
    } else if (name == "inversion.window_width") {
      c.inversion.window_width = number(line, name, value);
    } else if (name == "inversion.cutoff") {
      c.inversion.cutoff = number(line, name, value);
    } else if (name == "output.dir" || name == "output.directory") {
      c.output_dir = trim(value);
    } else if (name == "output.formats" || name == "output.format") {
      c.formats.clear();
      for (const auto& f : split_list(value)) c.formats.push_back(lower(f));
    } else {
      fail(line, "unknown key '" + name + "'");
    }
  }

  RunConfig parse(const std::string& text) {
    RunConfig c;
    std::stringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    static const std::set<std::string> kSections{
        "run", "grid", "potential", "scf", "solver", "inversion", "output"};
    while (std::getline(in, raw)) {
      ++line;
      const auto comment = raw.find_first_of("#;");
      std::string body = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
      if (body.empty()) continue;
      if (body.front() == '[') {
        if (body.back() != ']') fail(line, "malformed section header '" + body + "'");
        section = lower(trim(body.substr(1, body.size() - 2)));
        if (!kSections.count(section)) fail(line, "unknown section '" + section + "'");
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + body + "'");
      const std::string key = lower(trim(body.substr(0, eq)));
      const std::string value = trim(body.substr(eq + 1));
      if (key.empty()) fail(line, "missing key before '='");
      if (value.empty()) fail(line, "missing value for '" + key + "'");
      assign(c, line, section, key, value);
    }
    c.scf.theta = c.thetas.front();
    try {
      c.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(source_ + ": " + e.what());
    }
    return c;
  }

 private:
  std::string source_;
  std::set<std::string> seen_;
};

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kExact2e: return "exact2e";
    case RunMode::kExact1e: return "exact1e";
    case RunMode::kScfXonly: return "scf_xonly";
    case RunMode::kInvert: return "invert";
    case RunMode::kCorrelation: return "correlation";
    case RunMode::kAffinity: return "affinity";
    case RunMode::kSweepLambda: return "sweep_lambda";
    case RunMode::kTableTheta: return "table_theta";
  }
  return "unknown";
}

RunMode parse_mode(const std::string& text) {
  const std::string m = lower(trim(text));
  for (RunMode mode : {RunMode::kExact2e, RunMode::kExact1e, RunMode::kScfXonly,
                       RunMode::kInvert, RunMode::kCorrelation, RunMode::kAffinity,
                       RunMode::kSweepLambda, RunMode::kTableTheta}) {
    if (to_string(mode) == m) return mode;
  }
  throw ConfigError(
      "mode: expected one of exact2e, exact1e, scf_xonly, invert, correlation, "
      "affinity, sweep_lambda, table_theta (got '" + m + "')");
}

void RunConfig::validate() const {
  constexpr double kQuarterPi = std::numbers::pi / 4.0;
  if (thetas.empty()) throw ConfigError("theta: at least one angle is required");
  for (double t : thetas) {
    if (!(t > 0.0 && t < kQuarterPi)) {
      std::ostringstream msg;
      msg << "theta must lie in (0, 0.7854) (got " << t << ")";
      throw ConfigError(msg.str());
    }
  }
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    if (!(thetas[i] > thetas[i - 1])) {
      throw ConfigError("theta: angles must be strictly increasing");
    }
  }
  if (lambdas.empty()) throw ConfigError("lambda: at least one value is required");
  for (double l : lambdas) {
    PotentialParams p = potential;
    p.lambda = l;
    p.validate();
  }
  potential.validate();
  if (!(grid.x_min < grid.x_max)) {
    throw ConfigError("grid: x_min must be < x_max");
  }
  if (grid.points.empty()) throw ConfigError("grid.points: at least one size is required");
  for (int n : grid.points) {
    if (n < 8) {
      std::ostringstream msg;
      msg << "grid.points must be >= 8 (got " << n << ")";
      throw ConfigError(msg.str());
    }
  }
  if (scf.order != 2 && scf.order != 4 && scf.order != 6) {
    throw ConfigError("grid.order must be 2, 4 or 6");
  }
  SCFConfig probe = scf;
  probe.theta = thetas.front();
  probe.validate();
  if (!(scf.exact.theta_step > 0.0)) throw ConfigError("solver.theta_step must be > 0");
  if (!(scf.exact.stationarity_tol > 0.0)) {
    throw ConfigError("solver.stationarity_tol must be > 0");
  }
  if (scf.exact.one_body_k < 1) throw ConfigError("solver.one_body_k must be >= 1");
  if (scf.exact.two_body_k < 1) throw ConfigError("solver.two_body_k must be >= 1");
  if (!(scf.exact.solver_tol > 0.0)) throw ConfigError("solver.tol must be > 0");
  if (!(scf.exact.symmetry_tol > 0.0)) throw ConfigError("solver.symmetry_tol must be > 0");
  if (!(inversion.window_width > 0.0)) {
    throw ConfigError("inversion.window_width must be > 0");
  }
  if (!(inversion.cutoff >= 0.0 && inversion.cutoff < 1.0)) {
    throw ConfigError("inversion.cutoff must lie in [0, 1)");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (formats.empty()) throw ConfigError("output.formats: at least one format is required");
  for (const auto& f : formats) {
    if (f != "csv") throw ConfigError("output.formats: only 'csv' is supported (got '" + f + "')");
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> e;
  e.emplace_back("mode", to_string(mode));
  e.emplace_back("theta", join(thetas));
  e.emplace_back("lambda", join(lambdas));
  e.emplace_back("grid.x_min", format_double(grid.x_min));
  e.emplace_back("grid.x_max", format_double(grid.x_max));
  e.emplace_back("grid.points", join(grid.points));
  e.emplace_back("grid.order", std::to_string(scf.order));
  e.emplace_back("potential.a", format_double(potential.a));
  e.emplace_back("potential.b", format_double(potential.b));
  e.emplace_back("potential.c", format_double(potential.c));
  e.emplace_back("potential.d", format_double(potential.d));
  e.emplace_back("scf.mixing", format_double(scf.mixing));
  e.emplace_back("scf.max_iter", std::to_string(scf.max_iter));
  e.emplace_back("scf.tol", format_double(scf.tol));
  e.emplace_back("scf.eig_tol", format_double(scf.eig_tol));
  e.emplace_back("scf.hartree_scaling",
                 scf.hartree_scaling == HartreeScaling::kScaledKernel ? "scaled"
                                                                      : "prefactor");
  e.emplace_back("solver.theta_step", format_double(scf.exact.theta_step));
  e.emplace_back("solver.stationarity_tol", format_double(scf.exact.stationarity_tol));
  e.emplace_back("solver.one_body_k", std::to_string(scf.exact.one_body_k));
  e.emplace_back("solver.two_body_k", std::to_string(scf.exact.two_body_k));
  e.emplace_back("solver.tol", format_double(scf.exact.solver_tol));
  e.emplace_back("solver.symmetry_tol", format_double(scf.exact.symmetry_tol));
  e.emplace_back("inversion.window_width", format_double(inversion.window_width));
  e.emplace_back("inversion.cutoff", format_double(inversion.cutoff));
  e.emplace_back("output.formats", join(formats));
  return e;
}

RunConfig parse_config_string(const std::string& text, const std::string& source) {
  return Parser(source).parse(text);
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw ConfigError("cannot read config file '" + path.string() + "'");
  return Parser(path.string()).parse(buffer.str());
}

}  // namespace dfrt
