// lagvar: run the verification battery and dump kernel, norm and operator tables.

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

#include "lagvar/errors.hpp"
#include "lagvar/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Laguerre semigroup operators on variable exponent spaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir, filter;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--filter", filter, "glob on experiment ids");

  auto* verify = app.add_subcommand("verify", "run the property battery and write reports");
  auto* kernels = app.add_subcommand("kernels", "dump kernel tables");
  std::optional<std::string> which;
  kernels->add_option("--which", which, "heat, poisson, riesz, multiplier or h-aux");
  auto* norms = app.add_subcommand("norms", "Luxemburg norms of the test families");
  auto* operators = app.add_subcommand("operators", "operator norm ratios under grid doubling");
  auto* report = app.add_subcommand("report", "re-check and summarize existing verify reports");
  for (auto* sub : {verify, kernels, norms, operators, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  lagvar::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = lagvar::load_config(config_path);
    if (out_dir) cfg.out_dir = *out_dir;
    if (filter) cfg.filter = *filter;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (which) cfg.kernels_which = *which;
    lagvar::validate_config(cfg);
  } catch (const lagvar::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    if (*verify) return lagvar::cmd_verify(cfg);
    if (*kernels) return lagvar::cmd_kernels(cfg, cfg.kernels_which);
    if (*norms) return lagvar::cmd_norms(cfg);
    if (*operators) return lagvar::cmd_operators(cfg);
    if (*report) return lagvar::cmd_report(cfg);
  } catch (const lagvar::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
