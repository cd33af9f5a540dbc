#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "lagvar/errors.hpp"
#include "lagvar/geometry.hpp"
#include "lagvar/semigroup.hpp"

using namespace lagvar;

namespace {

// direct Bessel-product formula with Boost's I_nu, n = 1
double boost_heat(double a, double t, double x, double y) {
  const double e = std::exp(-t), d = 1.0 - e;
  const double z = 2.0 * std::sqrt(e) * x * y / d;
  return std::tgamma(a + 1.0) / d * std::pow(std::sqrt(e) * x * y, -a) * boost::math::cyl_bessel_i(a, z) *
         std::exp(-e * (x * x + y * y) / d);
}

HeatEval eval_of(double a, double t, HeatMethod m = HeatMethod::bessel_product) {
  HeatEval e{AlphaParam({a}), t, m};
  return e;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("method cross-check at a single point") {
  const Point x{1.0}, y{2.0};
  const double ref = boost_heat(0.0, 1.0, 1.0, 2.0);
  const double bp = heat_kernel(eval_of(0.0, 1.0), x, y).value;
  const double si = heat_kernel(eval_of(0.0, 1.0, HeatMethod::s_integral), x, y).value;
  const double sp = heat_kernel(eval_of(0.0, 1.0, HeatMethod::spectral), x, y).value;
  CHECK(rel(bp, ref) <= 1e-12);
  CHECK(rel(si, bp) <= 1e-8);
  CHECK(rel(sp, bp) <= 1e-6);
  CHECK(heat_kernel(eval_of(0.0, 1.0), x, y).value == heat_kernel(eval_of(0.0, 1.0), y, x).value);
}

TEST_CASE("bessel product vs s-integral vs spectral on a probe grid") {
  for (double a : {0.0, 0.5, 2.0}) {
    double worst_si = 0.0, worst_sp = 0.0, worst_ref = 0.0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j)
        for (double t : {0.05, 0.1, 0.5, 1.0, 2.0}) {
          const double x = 0.1 + 0.3 * i, y = 0.15 + 0.3 * j;
          const double bp = heat_kernel(eval_of(a, t), {x}, {y}).value;
          worst_ref = std::max(worst_ref, rel(bp, boost_heat(a, t, x, y)));
          worst_si = std::max(worst_si, rel(heat_kernel(eval_of(a, t, HeatMethod::s_integral), {x}, {y}).value, bp));
          if (t >= 0.5) {
            const double sp = heat_kernel(eval_of(a, t, HeatMethod::spectral), {x}, {y}).value;
            worst_sp = std::max(worst_sp, rel(sp, bp));
            const double tail = spectral_tail_bound(AlphaParam({a}), t, 60, {x}, {y});
            double mag = 0.0;  // rounding scale of the partial sum
            for (int k = 0; k <= 60; ++k)
              mag += std::exp(-k * t) * std::abs(laguerre_value(k, a, x * x) * laguerre_value(k, a, y * y));
            CHECK(std::abs(sp - bp) <= 2.0 * tail + 1e-14 * mag + 1e-13 * bp);
          }
        }
    INFO("alpha = " << a);
    CHECK(worst_ref <= 1e-10);
    CHECK(worst_si <= 1e-8);
    CHECK(worst_sp <= 1e-6);
  }
}

TEST_CASE("two-dimensional kernel factorizes") {
  AlphaParam al({0.0, 1.0});
  HeatEval e{al, 0.7};
  const Point x{0.4, 1.3}, y{1.1, 0.6};
  const double prod = boost_heat(0.0, 0.7, 0.4, 1.1) * boost_heat(1.0, 0.7, 1.3, 0.6);
  CHECK(rel(heat_kernel(e, x, y).value, prod) <= 1e-11);
  e.method = HeatMethod::s_integral;
  CHECK(rel(heat_kernel(e, x, y).value, prod) <= 1e-8);
  e.method = HeatMethod::spectral;
  e.k_max = 40;
  CHECK(rel(heat_kernel(e, x, y).value, prod) <= 1e-6);
}

TEST_CASE("kernel errors and flags") {
  CHECK_THROWS_AS(heat_kernel(eval_of(0.0, 0.0), {1.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(heat_kernel(eval_of(0.0, 1.0), {1.0, 2.0}, {1.0}), DimensionError);
  HeatEval e = eval_of(0.0, 1.0, HeatMethod::s_integral);
  e.order = 2;
  CHECK_THROWS_AS(heat_kernel(e, {1.0}, {1.0}), DomainError);
  CHECK(heat_kernel(eval_of(0.0, 1e-7), {1.0}, {1.0}).flagged);
  HeatEval sp = eval_of(0.0, 0.01, HeatMethod::spectral);
  CHECK(heat_kernel(sp, {1.0}, {1.0}).flagged);
}

TEST_CASE("conservation") {
  for (double a : {0.0, 0.5, 2.0}) {
    auto g = panel_grid(AlphaParam({a}), Measure::mu_alpha, 9.0, 60, 16);
    for (double t : {0.05, 0.5, 2.0})
      for (double x : {0.2, 1.0, 2.5}) {
        double s = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) s += g.weight(k) * heat_kernel(eval_of(a, t), {x}, g.point(k)).value;
        CHECK(std::abs(s - 1.0) <= 1e-8);
      }
  }
}

TEST_CASE("local and global parts") {
  const double c0 = RegionParams::defaults(AlphaParam({0.0})).c0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 4.0), ut(0.05, 2.0);
  for (int i = 0; i < 30; ++i) {
    const double x = u(rng), y = u(rng), t = ut(rng);
    auto e = eval_of(0.0, t, HeatMethod::s_integral);
    auto sp = heat_kernel_split(e, c0, {x}, {y});
    const double w = heat_kernel(eval_of(0.0, t), {x}, {y}).value;
    CHECK(rel(sp.local_part + sp.global_part, w) <= 1e-8);
  }
  // x = y small: every s is local
  auto sp = heat_kernel_split(eval_of(0.0, 0.3, HeatMethod::s_integral), c0, {0.1}, {0.1});
  CHECK(sp.global_part <= 1e-12 * sp.local_part);
  // no s is local
  auto far = heat_kernel_split(eval_of(0.0, 0.5, HeatMethod::s_integral), c0, {5.0}, {0.2});
  CHECK(far.local_part == 0.0);
  CHECK(far.global_part > 0.0);

  AlphaParam al2({0.0, 0.5});
  const double c02 = RegionParams::defaults(al2).c0;
  HeatEval e2{al2, 0.8, HeatMethod::s_integral};
  for (int i = 0; i < 5; ++i) {
    const Point x{u(rng), u(rng)}, y{u(rng), u(rng)};
    auto s2 = heat_kernel_split(e2, c02, x, y);
    CHECK(rel(s2.local_part + s2.global_part, heat_kernel(HeatEval{al2, 0.8}, x, y).value) <= 1e-8);
  }
}

TEST_CASE("heat_apply") {
  auto g = panel_grid(AlphaParam({0.0}), Measure::mu_alpha, 9.0, 60, 16);
  auto one = DiscreteFunction::sample(g, [](const Point&) { return 1.0; });
  auto l1 = DiscreteFunction::sample(g, [](const Point& x) { return laguerre_value(1, 0.0, x[0] * x[0]); });
  std::vector<Point> probes;
  for (double x = 0.1; x < 3.0; x += 0.2) probes.push_back({x});
  auto w1 = heat_apply(one, eval_of(0.0, 0.3), probes);
  for (double v : w1) CHECK(std::abs(v - 1.0) <= 1e-8);
  auto wl = heat_apply(l1, eval_of(0.0, std::log(2.0)), probes);
  for (std::size_t i = 0; i < probes.size(); ++i)
    CHECK(std::abs(wl[i] - 0.5 * laguerre_value(1, 0.0, probes[i][0] * probes[i][0])) <= 1e-6);
  auto mu = mu_grid_laguerre(AlphaParam({0.0}), 40);
  CHECK_THROWS_AS(heat_apply(DiscreteFunction::sample(panel_grid(AlphaParam({0.0}), Measure::m_alpha, 5.0, 4, 8), [](const Point&) { return 1.0; }), eval_of(0.0, 1.0), probes), DomainError);
  (void)mu;
}

TEST_CASE("semigroup law and contraction") {
  auto g = panel_grid(AlphaParam({0.0}), Measure::mu_alpha, 8.0, 48, 16);
  auto f = DiscreteFunction::sample(g, [](const Point& x) { return std::exp(-(x[0] - 1.0) * (x[0] - 1.0)) + 0.3 * x[0]; });
  std::vector<Point> probes;
  for (double x = 0.1; x < 3.0; x += 0.3) probes.push_back({x});
  for (double t : {0.1, 0.5, 1.0})
    for (double s : {0.1, 0.5, 1.0}) {
      auto ws = heat_apply_on_grid(f, eval_of(0.0, s));
      auto lhs = heat_apply(ws, eval_of(0.0, t), probes);
      auto rhs = heat_apply(f, eval_of(0.0, t + s), probes);
      double worst = 0.0;
      for (std::size_t i = 0; i < probes.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
      CHECK(worst <= 1e-5);
    }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto coarse = panel_grid(AlphaParam({0.0}), Measure::mu_alpha, 7.0, 28, 12);
  for (int rep = 0; rep < 5; ++rep) {
    const double c0 = u(rng), c1 = u(rng), c2 = u(rng);
    auto h = DiscreteFunction::sample(coarse, [&](const Point& x) { return c0 + c1 * std::sin(2.0 * x[0]) + c2 * std::exp(-x[0]); });
    auto wh = heat_apply_on_grid(h, eval_of(0.0, 0.4));
    CHECK(classical_norm(wh, 2.0) <= (1.0 + 1e-6) * classical_norm(h, 2.0));
    CHECK(classical_norm(wh, 1.0) <= (1.0 + 1e-6) * classical_norm(h, 1.0));
  }
}

TEST_CASE("subordination rule") {
  const auto rule = SubordinationRule::log_panel();
  for (double t : {0.01, 0.1, 1.0, 10.0}) CHECK(std::abs(rule.mass(t) - 1.0) <= 1e-10);
  // e^{-t sqrt(lambda)} from the heat multipliers e^{-lambda u}
  for (double lam : {1.0, 2.0, 5.0})
    for (double t : {0.01, 0.3, 2.0}) {
      const double v = rule.apply(t, [&](double u) { return std::exp(-lam * u); });
      CHECK(std::abs(v - std::exp(-t * std::sqrt(lam))) <= 1e-10);
    }
  const auto lag = SubordinationRule::laguerre(64);
  CHECK(lag.order() == 64);
  CHECK(std::abs(lag.mass(1.0) - 1.0) <= 1e-10);
  CHECK(std::abs(lag.apply(2.0, [](double u) { return std::exp(-u); }) - std::exp(-2.0)) <= 1e-5);
}

TEST_CASE("poisson kernel") {
  const auto rule = SubordinationRule::log_panel();
  const AlphaParam a0({0.0});
  auto g = panel_grid(a0, Measure::mu_alpha, 9.0, 60, 16);
  for (double t : {0.1, 1.0})
    for (double x : {0.3, 1.5}) {
      double s = 0.0, sl = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double p = poisson_kernel(a0, t, {x}, g.point(k), rule).value;
        CHECK(p > 0.0);
        s += g.weight(k) * p;
        sl += g.weight(k) * p * laguerre_value(2, 0.0, g.point(k)[0] * g.point(k)[0]);
      }
      CHECK(std::abs(s - 1.0) <= 1e-6);
      CHECK(std::abs(sl - std::exp(-t * std::sqrt(2.0)) * laguerre_value(2, 0.0, x * x)) <= 1e-5);
    }
  // projection onto constants at large t
  CHECK(std::abs(poisson_kernel(a0, 50.0, {0.7}, {1.2}, rule).value - 1.0) <= 1e-4);
  CHECK_THROWS_AS(poisson_kernel(a0, -1.0, {0.7}, {1.2}, rule), DomainError);
}

TEST_CASE("poisson t-derivatives") {
  const auto rule = SubordinationRule::log_panel();
  const AlphaParam a0({0.0});
  const Point x{1.0}, y{2.0};
  const double h = 1e-4;
  const double fd = (poisson_kernel(a0, 1.0 + h, x, y, rule).value - poisson_kernel(a0, 1.0 - h, x, y, rule).value) / (2.0 * h);
  CHECK(rel(dt_poisson(a0, 1, 1.0, x, y, rule), fd) <= 1e-5);
  const double fd2 = (poisson_kernel(a0, 1.0 + h, x, y, rule).value - 2.0 * poisson_kernel(a0, 1.0, x, y, rule).value +
                      poisson_kernel(a0, 1.0 - h, x, y, rule).value) / (h * h);
  CHECK(rel(dt_poisson(a0, 2, 1.0, x, y, rule), fd2) <= 1e-4);
  for (int k = 1; k <= 6; ++k)
    for (double lam : {1.0, 3.0}) {
      const double t = 0.8;
      const double v = subordinate_dt(k, t, [&](double u) { return std::exp(-lam * u); }, rule);
      CHECK(std::abs(v - std::pow(-std::sqrt(lam), k) * std::exp(-std::sqrt(lam) * t)) <= 1e-5);
    }
  CHECK(std::abs(subordinate_dt(1, 1.0, [](double) { return 1.0; }, rule)) <= 1e-8);
  CHECK_THROWS_AS(dt_poisson(a0, 9, 1.0, x, y, rule), DomainError);
  CHECK_THROWS_AS(dt_poisson(a0, 0, 1.0, x, y, rule), DomainError);
}

TEST_CASE("heat kernel t-derivative") {
  for (double a : {0.0, 1.5}) {
    const AlphaParam al({a});
    for (double t : {0.1, 1.0}) {
      const double h = 1e-5 * t;
      const double fd = (std::exp(heat_kernel_log(al, t + h, {0.8}, {1.3})) - std::exp(heat_kernel_log(al, t - h, {0.8}, {1.3}))) / (2 * h);
      CHECK(rel(heat_kernel_dt(al, t, {0.8}, {1.3}), fd) <= 1e-6);
    }
  }
}

TEST_CASE("degree-4 derivative structure") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 3.0), us(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    AlphaParam al({0.5});
    KernelContext ctx(al, {u(rng)}, {u(rng)}, {us(rng)});
    auto d = derivative_structure_check(ctx);
    CHECK(d.fit_residual <= 1e-8);
    CHECK(d.sign_changes <= 4);
    CHECK(d.coeffs.size() == 5);
  }
}
