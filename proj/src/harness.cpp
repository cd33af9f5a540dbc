#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "harness_internal.hpp"
#include "lagvar/errors.hpp"
#include "lagvar/harness.hpp"

namespace lagvar {

namespace {

const std::vector<std::string> kModules{"specfun", "geometry", "varlp", "semigroup", "operators", "harness"};

const char* criterion_title(int c) {
  static const char* titles[] = {"",
                                 "orthonormality",
                                 "eigenfunction identity",
                                 "heat kernel cross-validation",
                                 "conservation and contraction",
                                 "semigroup law",
                                 "subordination",
                                 "quadratic form inequality",
                                 "heat maximal kernel analysis",
                                 "g-function identities",
                                 "Riesz transforms",
                                 "Laplace transform multipliers",
                                 "variable exponent norms",
                                 "Calderon-Zygmund checks",
                                 "derivative structure",
                                 "norm-ratio stability",
                                 "determinism"};
  return (c >= 1 && c <= 16) ? titles[c] : "";
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '"' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("report: bad number '" + s + "'");
  return v;
}

struct SuiteRun {
  std::string module;
  std::vector<ReportRow> rows;
};

std::vector<SuiteRun> run_suites(const std::vector<Suite>& suites, const ExperimentConfig& cfg, bool log) {
  std::vector<SuiteRun> out;
  for (const auto& s : suites) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteRun r{s.module, {}};
    try {
      r.rows = s.run(cfg);
    } catch (const std::exception& e) {
      r.rows.push_back(make_row(s.id, s.criterion, sanitize(std::string("error: ") + e.what()), std::nan(""),
                                Comparator::le, 0.0));
    }
    // wall time goes to the log only so the CSVs stay byte-stable
    if (log) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::fprintf(stderr, "[verify] %-28s %8.2f s\n", s.id.c_str(), secs);
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Re-runs a cheap parallel suite at one thread and at several, and compares
/// the report bytes with each other and with the main run.
ReportRow determinism_row(const ExperimentConfig& cfg, const std::vector<ReportRow>& main_rows) {
  const std::string probe = cfg.operators.empty() ? "c12_holder" : "c03_hille_hardy";
  std::vector<std::string> texts;
  for (int th : {1, 4}) {
    ExperimentConfig c = cfg;
    c.threads = th;
    c.filter = probe;
    const auto runs = run_suites(select_suites(c), c, false);
    std::vector<ReportRow> rows;
    for (const auto& r : runs) rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    texts.push_back(report_csv(rows));
  }
  std::vector<ReportRow> mine;
  for (const auto& r : main_rows)
    if (r.experiment == probe) mine.push_back(r);
  double differing = 0.0;
  if (texts[0] != texts[1]) differing += 1.0;
  if (!mine.empty() && report_csv(mine) != texts[0]) differing += 1.0;
  return make_row("c16_determinism", 16, "differing reruns of " + probe + " at 1 and 4 threads",
                  differing, Comparator::le, 0.0);
}

bool ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    std::fprintf(stderr, "error: cannot create output directory '%s'\n", dir.c_str());
    return false;
  }
  return true;
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void print_summary(const std::vector<CriterionStatus>& s) {
  for (const auto& c : s)
    std::printf("criterion %2d %-4s %s (%d rows, %d failed)\n", c.criterion, c.status.c_str(), c.title.c_str(), c.rows,
                c.failed);
}

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({r.experiment, std::to_string(r.criterion), r.metric, format_double(r.value), to_string(r.cmp),
                     format_double(r.tolerance), r.pass ? "true" : "false"});
  return csv_text({"experiment", "criterion", "metric", "value", "comparator", "tolerance", "pass"}, cells);
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::vector<ReportRow> rows;
  std::stringstream ss(text);
  std::string line;
  bool header = true;
  while (std::getline(ss, line)) {
    if (header) {
      if (line != "experiment,criterion,metric,value,comparator,tolerance,pass")
        throw ConfigError("report: unexpected header '" + line + "'");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 7) throw ConfigError("report: row with " + std::to_string(c.size()) + " cells");
    ReportRow r;
    r.experiment = c[0];
    r.criterion = static_cast<int>(parse_cell(c[1]));
    r.metric = c[2];
    r.value = parse_cell(c[3]);
    if (c[4] != "le" && c[4] != "ge") throw ConfigError("report: bad comparator '" + c[4] + "'");
    r.cmp = c[4] == "le" ? Comparator::le : Comparator::ge;
    r.tolerance = parse_cell(c[5]);
    if (c[6] != "true" && c[6] != "false") throw ConfigError("report: bad pass flag '" + c[6] + "'");
    r.pass = c[6] == "true";
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<CriterionStatus> summarize(const std::vector<ReportRow>& rows) {
  std::vector<CriterionStatus> out;
  for (int c = 1; c <= 16; ++c) {
    CriterionStatus s{c, criterion_title(c), "SKIP", 0, 0};
    for (const auto& r : rows) {
      if (r.criterion != c) continue;
      ++s.rows;
      if (!r.pass) ++s.failed;
    }
    if (s.rows > 0) s.status = s.failed == 0 ? "PASS" : "FAIL";
    out.push_back(s);
  }
  return out;
}

std::string summary_csv(const std::vector<CriterionStatus>& s) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& c : s)
    cells.push_back({std::to_string(c.criterion), c.title, c.status, std::to_string(c.rows), std::to_string(c.failed)});
  return csv_text({"criterion", "title", "status", "rows", "failed_rows"}, cells);
}

VerifyResult run_verify(const ExperimentConfig& cfg) {
  const auto suites = select_suites(cfg);
  const auto runs = run_suites(suites, cfg, true);
  std::map<std::string, std::vector<ReportRow>> by_module;
  for (const auto& m : kModules) by_module[m];
  for (const auto& r : runs) {
    auto& dst = by_module[r.module];
    dst.insert(dst.end(), r.rows.begin(), r.rows.end());
  }
  std::vector<ReportRow> all;
  for (const auto& [m, rows] : by_module) all.insert(all.end(), rows.begin(), rows.end());
  if (detail::glob_match(cfg.filter, "c16_determinism")) by_module["harness"].push_back(determinism_row(cfg, all));

  VerifyResult res;
  for (auto& [m, rows] : by_module) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const ReportRow& a, const ReportRow& b) { return a.experiment < b.experiment; });
    res.files[m + ".csv"] = report_csv(rows);
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
  }
  std::stable_sort(res.rows.begin(), res.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) { return a.experiment < b.experiment; });
  res.files["summary.csv"] = summary_csv(summarize(res.rows));
  res.pass = std::all_of(res.rows.begin(), res.rows.end(), [](const ReportRow& r) { return r.pass; });
  return res;
}

int cmd_verify(const ExperimentConfig& cfg) {
  if (!ensure_dir(cfg.out_dir)) return 2;
  const auto res = run_verify(cfg);
  try {
    for (const auto& [name, content] : res.files) write_file(join(cfg.out_dir, name), content);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  print_summary(summarize(res.rows));
  for (const auto& r : res.rows)
    if (!r.pass)
      std::printf("  failed: %s %s value=%s %s %s\n", r.experiment.c_str(), r.metric.c_str(),
                  format_double(r.value).c_str(), to_string(r.cmp).c_str(), format_double(r.tolerance).c_str());
  return res.pass ? 0 : 1;
}

int cmd_kernels(const ExperimentConfig& cfg, const std::string& which) {
  if (!ensure_dir(cfg.out_dir)) return 2;
  try {
    std::string name = which;
    std::replace(name.begin(), name.end(), '-', '_');
    write_file(join(cfg.out_dir, "kernels_" + name + ".csv"), kernels_table(cfg, which));
    if (which == "heat") write_file(join(cfg.out_dir, "kernels_heat_cross.csv"), heat_cross_table(cfg));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

int cmd_norms(const ExperimentConfig& cfg) {
  if (!ensure_dir(cfg.out_dir)) return 2;
  try {
    write_file(join(cfg.out_dir, "norms.csv"), norms_table(cfg));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

int cmd_operators(const ExperimentConfig& cfg) {
  if (!ensure_dir(cfg.out_dir)) return 2;
  const auto rows = operator_ratios(cfg);
  try {
    write_file(join(cfg.out_dir, "operators.csv"), operators_table(cfg, rows));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  bool pass = true;
  for (const auto& r : rows)
    if (!r.pass) {
      pass = false;
      if (r.grid == 1)
        std::printf("unstable: %s %s %s refinement_ratio=%s\n", r.op.c_str(), r.family.c_str(), r.exponent.c_str(),
                    format_double(r.refinement_ratio).c_str());
    }
  return pass ? 0 : 1;
}

int cmd_report(const ExperimentConfig& cfg) {
  std::vector<ReportRow> rows;
  int found = 0;
  try {
    for (const auto& m : kModules) {
      std::ifstream in(join(cfg.out_dir, m + ".csv"), std::ios::binary);
      if (!in) continue;
      ++found;
      std::stringstream ss;
      ss << in.rdbuf();
      const auto part = parse_report_csv(ss.str());
      rows.insert(rows.end(), part.begin(), part.end());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  if (found == 0) {
    std::fprintf(stderr, "error: no verify reports in '%s'\n", cfg.out_dir.c_str());
    return 2;
  }
  int inconsistent = 0;
  for (auto& r : rows) {
    const bool again = row_passes(r.value, r.cmp, r.tolerance);
    if (again != r.pass) {
      ++inconsistent;
      std::printf("inconsistent pass flag: %s %s\n", r.experiment.c_str(), r.metric.c_str());
      r.pass = again;
    }
  }
  const auto s = summarize(rows);
  print_summary(s);
  const bool ok = inconsistent == 0 && std::none_of(s.begin(), s.end(), [](const CriterionStatus& c) {
                    return c.status == "FAIL";
                  });
  return ok ? 0 : 1;
}

}  // namespace lagvar
