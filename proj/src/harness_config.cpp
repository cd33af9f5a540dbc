#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "lagvar/errors.hpp"
#include "lagvar/harness.hpp"

namespace lagvar {

namespace {

const std::set<std::string>& known_operators() {
  static const std::set<std::string> ops{"maximal_heat", "maximal_poisson", "riesz",
                                         "g_function",   "multiplier",      "h_aux"};
  return ops;
}

const std::set<std::string>& known_kernels() {
  static const std::set<std::string> k{"heat", "poisson", "riesz", "multiplier", "h-aux"};
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x))
    throw ConfigError("config: key '" + key + "' expects a real number, got '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  return x;
}

int parse_count(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x < 1 || x > 100000000)
    throw ConfigError("config: key '" + key + "' must be a positive count, got '" + v + "'");
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("config: key '" + key + "' expects an unsigned 64-bit integer, got '" + v + "'");
  return x;
}

}  // namespace

ExponentField ExponentSpec::build(std::size_t n) const {
  if (kind == "constant") return ExponentField::constant(p, n);
  return ExponentField::decay_power(p_infty, A, q, n);
}

double ExponentSpec::p_minus() const {
  if (kind == "constant") return p;
  return A >= 0.0 ? p_infty : p_infty + A / std::exp(q);
}

std::string ExponentSpec::id() const {
  if (kind == "constant") return "constant:p=" + format_double(p);
  return "decay:p_inf=" + format_double(p_infty) + ";A=" + format_double(A) + ";q=" + format_double(q);
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"orthonormality", 1e-8},
      {"eigen_identity", 1e-10},
      {"hille_hardy_s_integral", 1e-8},
      {"hille_hardy_spectral", 1e-6},
      {"conservation", 1e-8},
      {"contraction", 1e-6},
      {"semigroup_law", 1e-5},
      {"subordination", 1e-5},
      {"poisson_below_heat", 1e-8},
      {"quadratic_inequality", 1e-12},
      {"vt_b_nonpositive", 1e-6},
      {"vt_comparability", 100.0},
      {"vt_refinement", 0.15},
      {"g_function_first", 1e-6},
      {"g_function_general", 1e-5},
      {"riesz_exact", 1e-12},
      {"riesz_truncation_drift", 0.10},
      {"riesz_kernel_agreement", 1e-3},
      {"multiplier_modulus", 1e-14},
      {"multiplier_identity", 1e-10},
      {"multiplier_sup_bound", 1e-10},
      {"luxemburg_classical", 1e-8},
      {"unit_modular", 1e-8},
      {"holder", 1.0},
      {"lift_class_constants", 1e-12},
      {"cz_drift", 0.10},
      {"derivative_fit", 1e-8},
      {"derivative_sign_changes", 4.0},
      {"norm_ratio_drift", 0.10},
      {"identity_ratio", 1e-10},
      {"plancherel_ratio", 1e-6},
  };
  return t;
}

double ExperimentConfig::tol(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  const auto& d = default_tolerances();
  auto it = d.find(name);
  if (it == d.end()) throw ConfigError("unknown tolerance '" + name + "'");
  return it->second;
}

bool ExperimentConfig::has_operator(const std::string& name) const {
  return std::find(operators.begin(), operators.end(), name) != operators.end();
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n < 1 || cfg.n > 3) throw ConfigError("config: n must be 1, 2 or 3");
  if (static_cast<int>(cfg.alpha.size()) != cfg.n)
    throw ConfigError("config: alpha has " + std::to_string(cfg.alpha.size()) + " entries but n = " +
                      std::to_string(cfg.n));
  for (double a : cfg.alpha)
    if (!(a >= 0.0)) throw ConfigError("config: alpha entries must be >= 0");
  const auto& e = cfg.exponent;
  if (e.kind != "constant" && e.kind != "decay_power")
    throw ConfigError("config: exponent.kind must be 'constant' or 'decay_power'");
  if (e.kind == "constant" && !(e.p >= 1.0)) throw ConfigError("config: exponent.p must be >= 1");
  if (e.kind == "decay_power") {
    if (!(e.p_infty >= 1.0)) throw ConfigError("config: exponent.p_infty must be >= 1");
    if (!(e.q > 0.0)) throw ConfigError("config: exponent.q must be > 0");
    if (!(e.p_infty + std::min(e.A, 0.0) >= 1.0)) throw ConfigError("config: exponent dips below 1");
  }
  for (const auto& op : cfg.operators)
    if (!known_operators().count(op)) throw ConfigError("config: unknown operator '" + op + "'");
  if (!known_kernels().count(cfg.kernels_which))
    throw ConfigError("config: kernels.which must be one of heat, poisson, riesz, multiplier, h-aux");
  if (!(cfg.grid_bound > 0.0)) throw ConfigError("config: grid.bound must be > 0");
  if (cfg.grid_order < 2) throw ConfigError("config: grid.order must be >= 2");
  if (cfg.kernel_t.empty()) throw ConfigError("config: kernels.t must list at least one time");
  for (double t : cfg.kernel_t)
    if (!(t > 0.0)) throw ConfigError("config: kernels.t entries must be > 0");
  if (!(cfg.kernel_bound > 0.0)) throw ConfigError("config: kernels.bound must be > 0");
  if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
  if (cfg.out_dir.empty()) throw ConfigError("config: out_dir must not be empty");

  // the boundedness experiments live in the regime 1 < p- <= p+ < inf
  if (!cfg.operators.empty()) {
    const double pm = e.p_minus();
    if (!(pm > 1.0))
      throw ConfigError("hypothesis violation: p- = " + format_double(pm) +
                        " but the operator experiments require p- > 1");
    if (cfg.has_operator("riesz") || cfg.has_operator("h_aux")) {
      const AlphaParam al(cfg.alpha);
      const double p_inf = e.kind == "constant" ? e.p : e.p_infty;
      const double eps = default_epsilon(pm, al);
      if (!(a_epsilon(eps, p_inf) > 0.0))
        throw ConfigError("hypothesis violation: a_eps = " + format_double(a_epsilon(eps, p_inf)) +
                          " must be positive for the global-part experiments");
    }
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("config: duplicate key '" + key + "'");

    if (key == "n") {
      cfg.n = static_cast<int>(parse_int(key, v));
      if (!seen.count("alpha")) cfg.alpha.assign(static_cast<std::size_t>(std::max(cfg.n, 0)), 0.0);
    } else if (key == "alpha") {
      cfg.alpha.clear();
      for (const auto& s : split_list(v)) cfg.alpha.push_back(parse_double(key, s));
    } else if (key == "exponent.kind") {
      cfg.exponent.kind = v;
    } else if (key == "exponent.p") {
      cfg.exponent.p = parse_double(key, v);
    } else if (key == "exponent.p_infty") {
      cfg.exponent.p_infty = parse_double(key, v);
    } else if (key == "exponent.A") {
      cfg.exponent.A = parse_double(key, v);
    } else if (key == "exponent.q") {
      cfg.exponent.q = parse_double(key, v);
    } else if (key == "operators") {
      cfg.operators = split_list(v);
    } else if (key == "multiplier.beta") {
      cfg.multiplier_beta = parse_double(key, v);
    } else if (key == "grid.bound") {
      cfg.grid_bound = parse_double(key, v);
    } else if (key == "grid.panels") {
      cfg.grid_panels = parse_count(key, v);
    } else if (key == "grid.order") {
      cfg.grid_order = parse_count(key, v);
    } else if (key == "grid.expansion_degree") {
      cfg.expansion_degree = parse_count(key, v);
    } else if (key == "grid.laguerre_order") {
      cfg.laguerre_order = parse_count(key, v);
    } else if (key == "t_grid.vt_points") {
      cfg.vt_points = parse_count(key, v);
    } else if (key == "t_grid.maximal_points") {
      cfg.maximal_t_points = parse_count(key, v);
    } else if (key == "t_grid.cz_points") {
      cfg.cz_t_points = parse_count(key, v);
    } else if (key == "samples.quadratic") {
      cfg.samples_quadratic = parse_count(key, v);
    } else if (key == "samples.maximal") {
      cfg.samples_maximal = parse_count(key, v);
    } else if (key == "samples.derivative") {
      cfg.samples_derivative = parse_count(key, v);
    } else if (key == "samples.holder") {
      cfg.samples_holder = parse_count(key, v);
    } else if (key == "samples.functions") {
      cfg.samples_functions = parse_count(key, v);
    } else if (key == "samples.riesz") {
      cfg.samples_riesz = parse_count(key, v);
    } else if (key == "samples.cz") {
      cfg.samples_cz = parse_count(key, v);
    } else if (key == "samples.family_size") {
      cfg.family_size = parse_count(key, v);
    } else if (key == "kernels.which") {
      cfg.kernels_which = v;
    } else if (key == "kernels.points") {
      cfg.kernel_points = parse_count(key, v);
    } else if (key == "kernels.bound") {
      cfg.kernel_bound = parse_double(key, v);
    } else if (key == "kernels.t") {
      cfg.kernel_t.clear();
      for (const auto& s : split_list(v)) cfg.kernel_t.push_back(parse_double(key, s));
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, v);
    } else if (key == "threads") {
      cfg.threads = parse_count(key, v);
    } else if (key == "out_dir") {
      cfg.out_dir = v;
    } else if (key == "filter") {
      cfg.filter = v.empty() ? "*" : v;
    } else if (key.rfind("tol.", 0) == 0) {
      const std::string name = key.substr(4);
      if (!default_tolerances().count(name)) throw ConfigError("config: unknown tolerance key '" + key + "'");
      const double t = parse_double(key, v);
      if (!(t >= 0.0)) throw ConfigError("config: tolerance '" + key + "' must be >= 0");
      cfg.tolerances[name] = t;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_string(Comparator c) { return c == Comparator::le ? "le" : "ge"; }

bool row_passes(double value, Comparator cmp, double tolerance) {
  if (std::isnan(value)) return false;
  return cmp == Comparator::le ? value <= tolerance : value >= tolerance;
}

ReportRow make_row(std::string experiment, int criterion, std::string metric, double value,
                   Comparator cmp, double tolerance) {
  ReportRow r;
  r.experiment = std::move(experiment);
  r.criterion = criterion;
  r.metric = std::move(metric);
  r.value = value;
  r.cmp = cmp;
  r.tolerance = tolerance;
  r.pass = row_passes(value, cmp, tolerance);
  return r;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  auto check = [](const std::string& cell) {
    if (cell.find_first_of(",\"\n") != std::string::npos)
      throw DomainError("csv: cell needs quoting: " + cell);
  };
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    check(header[i]);
    out += (i ? "," : "") + header[i];
  }
  out += '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw DimensionError("csv: row width differs from header");
    for (std::size_t i = 0; i < r.size(); ++i) {
      check(r[i]);
      out += (i ? "," : "") + r[i];
    }
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (!err) err = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace lagvar
