#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lagvar/errors.hpp"
#include "lagvar/harness.hpp"

using namespace lagvar;

namespace {

using Table = std::vector<std::map<std::string, std::string>>;

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Table parse_table(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  const auto header = cells(line);
  Table t;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto c = cells(line);
    REQUIRE(c.size() == header.size());
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < c.size(); ++i) row[header[i]] = c[i];
    t.push_back(row);
  }
  return t;
}

double num(const std::string& s) { return std::stod(s); }

ExperimentConfig small_cfg() {
  ExperimentConfig cfg;
  cfg.kernel_points = 4;
  cfg.family_size = 2;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(
      "# comment\n"
      "n = 2\n"
      "alpha = 0.5, 1\n"
      "exponent.kind = constant\n"
      "exponent.p = 3\n"
      "operators = multiplier\n"
      "seed = 42\n"
      "tol.semigroup_law = 1e-3\n");
  CHECK(cfg.n == 2);
  REQUIRE(cfg.alpha.size() == 2);
  CHECK(cfg.alpha[1] == 1.0);
  CHECK(cfg.exponent.p_minus() == 3.0);
  CHECK(cfg.has_operator("multiplier"));
  CHECK_FALSE(cfg.has_operator("riesz"));
  CHECK(cfg.seed == 42u);
  CHECK(cfg.tol("semigroup_law") == 1e-3);
  CHECK(cfg.tol("orthonormality") == default_tolerances().at("orthonormality"));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("nonsense = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n = 1\nn = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n = one\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("tol.not_a_tolerance = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n = 2\nalpha = 0\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/lagvar.conf"), ConfigError);
}

TEST_CASE("p- = 1 with operators is a hypothesis violation") {
  try {
    parse_config("exponent.kind = constant\nexponent.p = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("hypothesis") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("exponent.p_infty = 1\n"), ConfigError);
  // norms alone are fine at p- = 1
  CHECK_NOTHROW(parse_config("exponent.kind = constant\nexponent.p = 1\noperators =\n"));
}

TEST_CASE("empty operator list keeps only specfun, geometry and varlp") {
  const auto cfg = parse_config("operators =\n");
  const auto suites = select_suites(cfg);
  REQUIRE_FALSE(suites.empty());
  for (const auto& s : suites) {
    CHECK((s.module == "specfun" || s.module == "geometry" || s.module == "varlp"));
  }
  ExperimentConfig full;
  full.filter = "c1[05]*";
  const auto picked = select_suites(full);
  REQUIRE(picked.size() == 2);
  CHECK(picked[0].id == "c10_riesz");
  CHECK(picked[1].id == "c15_norm_ratio");
}

TEST_CASE("report rows") {
  CHECK(row_passes(1.0, Comparator::le, 1.0));
  CHECK_FALSE(row_passes(1.5, Comparator::le, 1.0));
  CHECK(row_passes(2.0, Comparator::ge, 1.0));
  CHECK_FALSE(row_passes(std::nan(""), Comparator::le, 1.0));
  CHECK_FALSE(row_passes(std::nan(""), Comparator::ge, 1.0));
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK_THROWS(csv_text({"a", "b"}, {{"1"}}));
  CHECK_THROWS(csv_text({"a"}, {{"x,y"}}));
}

TEST_CASE("report csv round trip") {
  std::vector<ReportRow> rows{make_row("c01_orthonormality", 1, "max_dev", 3.0e-15, Comparator::le, 1e-8),
                              make_row("c15_norm_ratio", 15, "drift", 0.3, Comparator::le, 0.1),
                              make_row("c08_maximal_analysis", 8, "count", 12.0, Comparator::ge, 1.0)};
  const auto back = parse_report_csv(report_csv(rows));
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].experiment == rows[i].experiment);
    CHECK(back[i].criterion == rows[i].criterion);
    CHECK(back[i].metric == rows[i].metric);
    CHECK(back[i].value == rows[i].value);
    CHECK(back[i].cmp == rows[i].cmp);
    CHECK(back[i].tolerance == rows[i].tolerance);
    CHECK(back[i].pass == row_passes(rows[i].value, rows[i].cmp, rows[i].tolerance));
  }
  const auto s = summarize(rows);
  REQUIRE(s.size() == 16);
  CHECK(s[0].status == "PASS");
  CHECK(s[1].status == "SKIP");
  CHECK(s[14].status == "FAIL");
  CHECK(s[14].failed == 1);
}

TEST_CASE("heat kernel table") {
  const auto cfg = small_cfg();
  const auto t = parse_table(kernels_table(cfg, "heat"));
  std::map<std::string, double> at1;
  for (const auto& r : t)
    if (r.at("method") == "bessel-product" && num(r.at("t")) == 1.0) at1[r.at("x0") + "|" + r.at("y0")] = num(r.at("value"));
  REQUIRE(at1.size() == 16);
  for (const auto& [key, v] : at1) {
    const auto bar = key.find('|');
    const double w = at1.at(key.substr(bar + 1) + "|" + key.substr(0, bar));
    CHECK(std::abs(v - w) <= 1e-12 * std::abs(v));
  }
  const auto cross = parse_table(heat_cross_table(cfg));
  REQUIRE_FALSE(cross.empty());
  for (const auto& r : cross) CHECK(num(r.at("max_pairwise_rel_dev")) <= 1e-6);
}

TEST_CASE("riesz table skips the diagonal") {
  const auto cfg = small_cfg();
  const auto t = parse_table(kernels_table(cfg, "riesz"));
  CHECK(t.size() == 4u * 4u - 4u);
  for (const auto& r : t) CHECK(r.at("x0") != r.at("y0"));
  CHECK_THROWS_AS(kernels_table(cfg, "wavelet"), ConfigError);
}

TEST_CASE("norms table") {
  const auto cfg = small_cfg();
  const auto t = parse_table(norms_table(cfg));
  int constant_rows = 0, zero_rows = 0;
  for (const auto& r : t) {
    if (r.at("flag") == "zero") {
      ++zero_rows;
      CHECK(num(r.at("norm")) == 0.0);
      continue;
    }
    REQUIRE(r.at("flag") == "ok");
    if (r.at("exponent").rfind("constant", 0) == 0) {
      ++constant_rows;
      CHECK(num(r.at("abs_diff")) <= 1e-8 * std::max(1.0, num(r.at("classical_norm"))));
    } else {
      CHECK(std::isfinite(num(r.at("class_Pe_inf"))));
      CHECK(std::isfinite(num(r.at("class_LH_inf"))));
      CHECK(std::isfinite(num(r.at("class_LH_0"))));
    }
  }
  CHECK(constant_rows > 0);
  CHECK(zero_rows > 0);
}

TEST_CASE("operator norm ratios") {
  auto cfg = small_cfg();
  cfg.operators = {"maximal_heat", "multiplier"};
  const auto rows = operator_ratios(cfg);
  int identity = 0, phi1 = 0, maxconst = 0;
  for (const auto& r : rows) {
    if (r.op == "identity") {
      ++identity;
      CHECK(std::abs(r.estimate - 1.0) <= 1e-10);
    }
    if (r.op == "multiplier_phi1" && r.family == "laguerre_mean_zero" && r.exponent == "constant:p=2") {
      ++phi1;
      CHECK(r.estimate <= 1.0 + 1e-6);
    }
    if (r.op == "maximal_heat" && r.family == "constant") {
      ++maxconst;
      CHECK(r.estimate == 1.0);
    }
  }
  CHECK(identity > 0);
  CHECK(phi1 > 0);
  CHECK(maxconst > 0);
  CHECK_FALSE(operators_table(cfg, rows).empty());
}

TEST_CASE("parallel_for is thread-count independent") {
  const std::size_t count = 1000;
  auto run = [&](int threads) {
    std::vector<double> out(count);
    std::vector<std::atomic<int>> hits(count);
    parallel_for(count, threads, [&](std::size_t i) {
      hits[i].fetch_add(1);
      double s = 0.0;
      for (std::size_t k = 1; k <= 200; ++k) s += std::sin(static_cast<double>(i * k)) / static_cast<double>(k);
      out[i] = s;
    });
    for (const auto& h : hits) CHECK(h.load() == 1);
    return out;
  };
  const auto a = run(1);
  CHECK(run(3) == a);
  CHECK(run(8) == a);
}

TEST_CASE("verify output is thread-count independent") {
  auto cfg = parse_config("operators = multiplier\nfilter = c1[12]*\n");
  const auto one = run_verify(cfg);
  cfg.threads = 4;
  const auto four = run_verify(cfg);
  CHECK(one.files == four.files);
  CHECK(one.pass);
}
