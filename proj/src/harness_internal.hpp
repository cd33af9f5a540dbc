#pragma once

// Shared pieces of the harness translation units.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lagvar/harness.hpp"

namespace lagvar::detail {

/// Stable per-experiment seed: FNV-1a of the id mixed with the run seed.
std::uint64_t sub_seed(std::uint64_t seed, std::string_view id);

struct TestFunction {
  std::string family;
  std::string name;
  std::function<double(const Point&)> f;
  std::optional<Expansion> exact;  // used as is instead of a projection
};

/// Laguerre expansions (mean zero), Gaussian bumps at graded centers,
/// smoothed plateaus, and the constant 1.
std::vector<TestFunction> test_families(const ExperimentConfig& cfg, const AlphaParam& alpha);

/// Points whose coordinates are lo + (hi-lo)(i+1/2)/count, shifted per axis.
std::vector<Point> probe_points(std::size_t n, double lo, double hi, int count);

std::string alpha_label(const AlphaParam& a);

/// Shell-style glob (fnmatch) on experiment ids.
bool glob_match(const std::string& pattern, const std::string& text);

}  // namespace lagvar::detail
