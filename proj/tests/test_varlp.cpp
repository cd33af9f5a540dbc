#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lagvar/errors.hpp"
#include "lagvar/geometry.hpp"
#include "lagvar/quadrature.hpp"
#include "lagvar/varlp.hpp"

using namespace lagvar;

namespace {

const AlphaParam kA0({0.0});

ExponentField decay() { return ExponentField::decay_power(2.0, 1.0, 2.0); }

DiscreteFunction random_fn(const TensorGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double c0 = u(rng), c1 = u(rng), c2 = u(rng);
  return DiscreteFunction::sample(g, [&](const Point& x) { return c0 + c1 * std::exp(-(x[0] - 1.0) * (x[0] - 1.0)) + c2 * x[0]; });
}

}  // namespace

TEST_CASE("modular examples") {
  auto g = mu_grid_laguerre(kA0, 40);
  auto zero = DiscreteFunction::sample(g, [](const Point&) { return 0.0; });
  CHECK(modular(zero, decay()) == 0.0);

  for (int k = 0; k <= 6; ++k) {
    auto lk = DiscreteFunction::sample(g, [&](const Point& x) { return laguerre_value(k, 0.0, x[0] * x[0]); });
    CHECK(modular(lk, ExponentField::constant(2.0)) == doctest::Approx(1.0).epsilon(1e-8));
  }

  auto pg = panel_grid(kA0, Measure::mu_alpha, 7.0, 40, 16);
  auto one = DiscreteFunction::sample(pg, [](const Point&) { return 1.0; });
  const double m = modular(one, decay());
  CHECK(m > 0.0);
  CHECK(m <= 1.0 + 1e-12);
  auto oracle = integrate_adaptive([](double x) { return 2.0 * x * std::exp(-x * x); }, 0.0, INFINITY, 1e-13);
  CHECK(m == doctest::Approx(oracle.value).epsilon(1e-10));

  // overflow reported as +inf
  auto huge = DiscreteFunction::sample(pg, [](const Point&) { return 1e300; });
  CHECK(std::isinf(modular(huge, ExponentField::constant(3.0))));
}

TEST_CASE("luxemburg norm properties") {
  std::mt19937_64 rng(5);
  auto g = panel_grid(kA0, Measure::mu_alpha, 7.0, 20, 12);
  for (double p : {1.5, 2.0, 3.0, 10.0}) {
    for (int rep = 0; rep < 5; ++rep) {
      auto f = random_fn(g, rng);
      auto n = luxemburg_norm(f, ExponentField::constant(p));
      CHECK(n.norm == doctest::Approx(classical_norm(f, p)).epsilon(1e-8));
    }
  }
  auto p = decay();
  std::uniform_real_distribution<double> uc(-50.0, 50.0);
  for (int rep = 0; rep < 20; ++rep) {
    auto f = random_fn(g, rng);
    auto h = random_fn(g, rng);
    const double nf = luxemburg_norm(f, p).norm;
    CHECK(std::abs(luxemburg_norm(f, p).modular_at_norm - 1.0) <= 1e-8);
    const double c = uc(rng);
    DiscreteFunction cf = f;
    for (double& v : cf.values) v *= c;
    CHECK(luxemburg_norm(cf, p).norm == doctest::Approx(std::abs(c) * nf).epsilon(1e-10));
    DiscreteFunction sum = f;
    for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] += h.values[k];
    CHECK(luxemburg_norm(sum, p).norm <= nf + luxemburg_norm(h, p).norm + 1e-8);
    // monotone in lambda
    double last = INFINITY;
    for (double lam = 1e-3; lam < 1e3; lam *= 1.7) {
      const double m = modular_scaled(f, p, lam);
      CHECK(m < last);
      last = m;
    }
    if (modular(f, p) <= 1.0) CHECK(luxemburg_norm(f, p).norm <= 1.0);
  }
  auto zero = DiscreteFunction::sample(g, [](const Point&) { return 0.0; });
  CHECK(luxemburg_norm(zero, p).norm == 0.0);
}

TEST_CASE("conjugate exponents") {
  auto two = conjugate(ExponentField::constant(2.0));
  CHECK(two(Point{1.0}) == doctest::Approx(2.0));
  auto four = conjugate(ExponentField::constant(4.0));
  CHECK(four(Point{3.0}) == doctest::Approx(4.0 / 3.0));
  auto p = decay();
  auto pc = conjugate(p);
  const double x = 1.0 / std::sqrt(0.1) - std::numbers::e;
  CHECK(p(Point{x}) == doctest::Approx(2.1));
  CHECK(pc(Point{x}) == doctest::Approx(2.1 / 1.1).epsilon(1e-12));
  CHECK(pc.p_plus() == doctest::Approx(p.p_minus() / (p.p_minus() - 1.0)));
  CHECK(pc.p_infty() == doctest::Approx(2.0));
  CHECK(pc.p_plus() >= pc.p_infty());
  CHECK_THROWS_AS(conjugate(ExponentField::constant(1.0)), DomainError);
}

TEST_CASE("holder check") {
  auto g = panel_grid(kA0, Measure::mu_alpha, 7.0, 20, 12);
  auto f = DiscreteFunction::sample(g, [](const Point& x) { return 1.0 + x[0]; });
  auto zero = DiscreteFunction::sample(g, [](const Point&) { return 0.0; });
  CHECK(holder_check(f, zero, decay()).ratio == 0.0);
  CHECK(holder_check(f, f, ExponentField::constant(2.0)).ratio == doctest::Approx(0.5).epsilon(1e-10));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    auto ff = DiscreteFunction::sample(g, [&](const Point& x) { return std::exp(-a * (x[0] - b) * (x[0] - b)) + c; });
    auto gg = DiscreteFunction::sample(g, [&](const Point& x) { return 1.0 + c * x[0] * std::exp(-b * x[0]); });
    worst = std::max(worst, holder_check(ff, gg, decay()).ratio);
  }
  CHECK(worst <= 1.0);
}

TEST_CASE("class constants") {
  std::vector<Point> probes;
  for (double x = 0.0; x <= 200.0; x += 0.05) probes.push_back({x});
  auto cst = ExponentField::constant(3.0);
  for (auto c : {ExponentClass::LH0, ExponentClass::LHinf, ExponentClass::Pe_inf})
    CHECK(class_constants(cst, c, probes).constant == 0.0);
  auto p = decay();
  auto pe = class_constants(p, ExponentClass::Pe_inf, probes);
  CHECK(pe.pass);
  CHECK(pe.constant <= 1.0 + 1e-12);  // A x^2/(e+x)^2 < A
  auto lhinf = class_constants(p, ExponentClass::LHinf, probes);
  CHECK(lhinf.pass);
  CHECK(lhinf.constant < 1.0);
  std::vector<Point> near(probes.begin(), probes.begin() + 200);
  auto lh0 = class_constants(p, ExponentClass::LH0, near);
  CHECK(lh0.pass);
  CHECK(lh0.probes_used > 0);
}

TEST_CASE("radial lift") {
  auto cst = lift_exponent_radial(ExponentField::constant(2.5), {3});
  CHECK(cst(Point{0.1, 2.0, -1.0}) == 2.5);
  auto p = decay();
  auto lifted = lift_exponent_radial(p, {2});
  CHECK(lifted.p_minus() == p.p_minus());
  CHECK(lifted.p_plus() == p.p_plus());
  CHECK(lifted.dim() == 2);
  std::vector<Point> radial, base;
  for (double r = 0.0; r <= 50.0; r += 0.25) {
    base.push_back({r});
    radial.push_back({r * std::cos(0.7), r * std::sin(0.7)});
  }
  for (auto c : {ExponentClass::LHinf, ExponentClass::Pe_inf})
    CHECK(class_constants(lifted, c, radial).constant == doctest::Approx(class_constants(p, c, base).constant).epsilon(1e-12));
  CHECK(class_constants(lifted, ExponentClass::LH0, radial).constant <=
        class_constants(p, ExponentClass::LH0, base).constant + 1e-12);
  CHECK_THROWS_AS(lift_exponent_radial(p, {1, 1}), DimensionError);
}

TEST_CASE("tabulated exponent") {
  auto t = ExponentField::tabulated({{0.0, 1.0, 2.0}}, {3.0, 2.0, 2.5}, 2.5);
  CHECK(t(Point{0.5}) == doctest::Approx(2.5));
  CHECK(t(Point{10.0}) == doctest::Approx(2.5));
  CHECK(t.p_minus() == 2.0);
  CHECK(t.p_plus() == 3.0);
  auto t2 = ExponentField::tabulated({{0.0, 1.0}, {0.0, 1.0}}, {2.0, 3.0, 4.0, 5.0}, 3.5);
  CHECK(t2(Point{0.5, 0.5}) == doctest::Approx(3.5));
  CHECK_THROWS_AS(ExponentField::tabulated({{0.0, 1.0}}, {0.5, 2.0}, 2.0), DomainError);
}
