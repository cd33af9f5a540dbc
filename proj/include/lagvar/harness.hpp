#pragma once

// Experiment configuration, the verification battery, report files and the
// command entry points used by the CLI.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lagvar/operators.hpp"
#include "lagvar/varlp.hpp"

namespace lagvar {

struct ExponentSpec {
  std::string kind = "decay_power";  // constant | decay_power
  double p = 2.0;                    // constant kind
  double p_infty = 2.0;              // decay_power: p_inf + A / (e + |x|)^q
  double A = 1.0;
  double q = 2.0;

  ExponentField build(std::size_t n) const;
  double p_minus() const;
  /// Short stable identifier used in report rows.
  std::string id() const;
};

struct ExperimentConfig {
  int n = 1;
  std::vector<double> alpha{0.0};
  ExponentSpec exponent;
  std::vector<std::string> operators{"maximal_heat", "maximal_poisson", "riesz",
                                     "g_function",   "multiplier",      "h_aux"};
  double multiplier_beta = 0.5;

  // grids for the operator and norm experiments (level 0; level 1 doubles)
  double grid_bound = 7.0;
  int grid_panels = 10;
  int grid_order = 8;
  int expansion_degree = 40;
  int laguerre_order = 40;

  // t grids
  int vt_points = 2000;
  int maximal_t_points = 40;
  int cz_t_points = 60;

  // sample counts
  int samples_quadratic = 100000;
  int samples_maximal = 500;
  int samples_derivative = 100;
  int samples_holder = 1000;
  int samples_functions = 50;
  int samples_riesz = 100;
  int samples_cz = 120;
  int family_size = 4;

  std::uint64_t seed = 1;
  std::map<std::string, double> tolerances;  // overrides of the defaults
  std::string out_dir = "lagvar_out";
  int threads = 1;
  std::string filter = "*";
  std::string kernels_which = "heat";
  int kernel_points = 12;     // per axis, evenly spaced in (0, kernel_bound]
  double kernel_bound = 3.0;
  std::vector<double> kernel_t{0.1, 0.5, 1.0, 2.0};

  AlphaParam alpha_param() const { return AlphaParam(alpha); }
  double tol(const std::string& name) const;
  bool has_operator(const std::string& name) const;
};

/// Default tolerances by name; tol.<name> keys may override exactly these.
const std::map<std::string, double>& default_tolerances();

/// Parses flat `key = value` text; '#' starts a comment. Unknown keys, bad
/// values and hypothesis violations raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Consistency and hypothesis checks (called by parse_config and again after
/// command-line overrides).
void validate_config(const ExperimentConfig& cfg);

enum class Comparator { le, ge };
std::string to_string(Comparator c);

struct ReportRow {
  std::string experiment;
  int criterion = 0;
  std::string metric;
  double value = 0.0;
  Comparator cmp = Comparator::le;
  double tolerance = 0.0;
  bool pass = false;
};

/// value <= tolerance (le) or value >= tolerance (ge); NaN fails.
bool row_passes(double value, Comparator cmp, double tolerance);
ReportRow make_row(std::string experiment, int criterion, std::string metric, double value,
                   Comparator cmp, double tolerance);

/// printf("%.17g")
std::string format_double(double v);

/// Fixed-column CSV; every row must have header.size() cells.
std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);
void write_file(const std::string& path, const std::string& content);

/// Runs body(i) for i in [0, count) on up to threads workers. Each index is
/// handled exactly once; results must be written to per-index slots.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

struct Suite {
  std::string id;      // experiment id, e.g. c03_hille_hardy
  std::string module;  // specfun | geometry | varlp | semigroup | operators
  int criterion = 0;
  std::function<std::vector<ReportRow>(const ExperimentConfig&)> run;
};

/// The battery selected by the config (operator list) and the filter glob.
std::vector<Suite> select_suites(const ExperimentConfig& cfg);

struct VerifyResult {
  std::vector<ReportRow> rows;             // sorted by experiment id, then metric
  std::map<std::string, std::string> files;  // file name -> content
  bool pass = true;
};

/// Runs the selected battery; pure except for the thread pool.
VerifyResult run_verify(const ExperimentConfig& cfg);

/// Report CSV (experiment, criterion, metric, value, comparator, tolerance, pass).
std::string report_csv(const std::vector<ReportRow>& rows);
/// Parses report_csv output; the pass flag is kept as stored.
std::vector<ReportRow> parse_report_csv(const std::string& text);

struct CriterionStatus {
  int criterion = 0;
  std::string title;
  std::string status;  // PASS, FAIL or SKIP
  int rows = 0;
  int failed = 0;
};

/// One entry per criterion 1..16; SKIP when no row carries the criterion.
std::vector<CriterionStatus> summarize(const std::vector<ReportRow>& rows);
std::string summary_csv(const std::vector<CriterionStatus>& s);

// Commands. Return the process exit code (0 pass, 1 failure, 2 config error).
int cmd_verify(const ExperimentConfig& cfg);
int cmd_kernels(const ExperimentConfig& cfg, const std::string& which);
int cmd_norms(const ExperimentConfig& cfg);
int cmd_operators(const ExperimentConfig& cfg);
/// Re-reads the verify CSVs in out_dir, recomputes every pass flag from
/// value and tolerance, and prints the per-criterion summary.
int cmd_report(const ExperimentConfig& cfg);

// Table builders behind cmd_kernels, cmd_norms and cmd_operators; they
// return the CSV text so tests can inspect it.
std::string kernels_table(const ExperimentConfig& cfg, const std::string& which);
std::string heat_cross_table(const ExperimentConfig& cfg);
std::string norms_table(const ExperimentConfig& cfg);

struct OperatorRow {
  std::string op;
  std::string exponent;
  std::string family;
  int grid = 0;  // refinement level
  double estimate = 0.0;
  double refinement_ratio = 1.0;
  bool pass = true;
};

std::vector<OperatorRow> operator_ratios(const ExperimentConfig& cfg);
std::string operators_table(const ExperimentConfig& cfg, const std::vector<OperatorRow>& rows);

}  // namespace lagvar
