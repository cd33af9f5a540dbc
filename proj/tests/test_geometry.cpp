#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lagvar/errors.hpp"
#include "lagvar/geometry.hpp"
#include "lagvar/quadrature.hpp"

using namespace lagvar;

TEST_CASE("q_forms") {
  Point x{1.0, 2.0}, y{2.0, 1.0};
  auto q0 = q_forms(x, y, Point{0.0, 0.0});
  CHECK(q0.q_plus == doctest::Approx(10.0));
  CHECK(q0.q_minus == doctest::Approx(10.0));
  auto q = q_forms(x, y, Point{0.5, -0.5});
  CHECK(q.q_plus == doctest::Approx(10.0));
  CHECK(q.q_minus == doctest::Approx(10.0));
  auto lim = q_forms(Point{1.0}, Point{1.0}, Point{1.0 - 1e-15});
  CHECK(lim.q_minus == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lim.q_plus == doctest::Approx(4.0));
  CHECK_THROWS_AS(q_forms(Point{1.0}, Point{1.0, 2.0}, Point{0.0}), DimensionError);
}

TEST_CASE("region_classify") {
  AlphaParam a({0.0});
  auto params = RegionParams::defaults(a);
  CHECK(params.c0 == 9.0);
  KernelContext diag(a, {1.3}, {1.3}, {1.0});
  CHECK(region_classify(diag, RegionParams{1e-6, 9.0}) == Region::local);
  KernelContext far(a, {10.0}, {0.1}, {0.0});
  CHECK(region_classify(far, params) == Region::global);
  // monotone in tau
  KernelContext mid(a, {1.0}, {2.0}, {0.3});
  bool seen_local = false;
  for (double tau = 0.01; tau < 100.0; tau *= 1.3) {
    const bool local = region_classify(mid, RegionParams{tau, 9.0}) == Region::local;
    if (seen_local) CHECK(local);
    seen_local = seen_local || local;
  }
  CHECK(seen_local);
}

TEST_CASE("cutoff values") {
  AlphaParam a({0.5, 1.0});
  KernelContext c(a, {1.0, 2.0}, {1.0, 2.0}, {1.0, 1.0});
  auto v = cutoff_phi(c, 9.0);
  CHECK(v.value == 1.0);
  CHECK(v.grad_x[0] == 0.0);
  CHECK(v.grad_y[1] == 0.0);
  KernelContext far(a, {10.0, 3.0}, {0.1, 0.2}, {0.0, 0.0});
  CHECK(cutoff_phi(far, 9.0).value == 0.0);
  for (double r = 0.0; r <= 5.0; r += 0.01) {
    CHECK(cutoff_psi(r) >= 0.0);
    CHECK(cutoff_psi(r) <= 1.0);
  }
}

TEST_CASE("cutoff gradient against finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.05, 3.0), us(-0.999, 0.999);
  AlphaParam a({0.0, 1.0});
  const double c0 = 9.0;
  int tested = 0;
  double worst = 0.0, bound = 0.0;
  while (tested < 100) {
    Point x{ux(rng), ux(rng)}, y{ux(rng), ux(rng)}, s{us(rng), us(rng)};
    KernelContext ctx(a, x, y, s);
    const double r = region_ratio(ctx, c0);
    if (r < 1.05 || r > 3.95) continue;
    ++tested;
    auto v = cutoff_phi(ctx, c0);
    double gnorm = 0.0, err = 0.0;
    for (int which = 0; which < 2; ++which) {
      for (std::size_t i = 0; i < 2; ++i) {
        const double h = 1e-6;
        Point xp = x, xm = x, yp = y, ym = y;
        if (which == 0) {
          xp[i] += h;
          xm[i] -= h;
        } else {
          yp[i] += h;
          ym[i] -= h;
        }
        const double fd = (cutoff_phi(KernelContext(a, xp, yp, s), c0).value -
                           cutoff_phi(KernelContext(a, xm, ym, s), c0).value) / (2 * h);
        const double g = which == 0 ? v.grad_x[i] : v.grad_y[i];
        gnorm += g * g;
        err = std::max(err, std::abs(fd - g));
      }
    }
    gnorm = std::sqrt(gnorm);
    worst = std::max(worst, err / gnorm);
    bound = std::max(bound, (norm2(v.grad_x) + norm2(v.grad_y)) * std::sqrt(ctx.q_minus()));
  }
  CHECK(worst <= 1e-6);
  CHECK(std::isfinite(bound));
}

TEST_CASE("malpha_ball") {
  AlphaParam a({0.0});
  CHECK(malpha_ball(a, Point{2.0}, 1.0).exact == doctest::Approx(4.0));
  CHECK(malpha_ball(a, Point{0.0}, 1.0).exact == doctest::Approx(0.5));
  CHECK_THROWS_AS(malpha_ball(a, Point{1.0}, 0.0), DomainError);

  // two dimensions, alpha = 0: density x1 x2. Ball fully inside the orthant:
  // integral of x1 x2 over a disc = c1 c2 pi r^2
  AlphaParam a2({0.0, 0.0});
  auto m = malpha_ball(a2, Point{2.0, 3.0}, 0.5);
  CHECK(m.exact == doctest::Approx(6.0 * M_PI * 0.25).epsilon(1e-7));

  double lo = 1e300, hi = 0.0;
  for (double al : {0.0, 0.5, 2.0}) {
    AlphaParam p({al});
    for (double x = 1e-3; x < 50.0; x *= 2.0) {
      for (double r = 1e-3; r < 50.0; r *= 2.0) {
        const double ratio = malpha_ball(p, Point{x}, r).ratio;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
  }
  const double c = std::max(hi, 1.0 / lo);
  CHECK(c <= 20.0);
}

TEST_CASE("ball system") {
  AlphaParam a({0.0});
  auto one = build_ball_system(a, 0.4, 2.0);
  CHECK(one.centers.size() == 1);
  CHECK(one.cover_gap == 0.0);
  auto sys = build_ball_system(a, 5.0, 2.0);
  CHECK(sys.max_multiplicity <= 8);
  CHECK(sys.cover_gap == 0.0);
  CHECK(std::isfinite(sys.measure_constant));
  for (std::size_t l = 0; l < sys.centers.size(); ++l)
    CHECK(sys.radii[l] == 1.0 / (2.0 * (1.0 + norm2(sys.centers[l]))));
  AlphaParam a2({0.5, 0.0});
  auto sys2 = build_ball_system(a2, 3.0, 1.5, 60);
  CHECK(sys2.cover_gap == 0.0);
  CHECK(sys2.max_multiplicity >= 1);
  CHECK_THROWS_AS(build_ball_system(a, 1.0, 1.0), DomainError);
}

TEST_CASE("cz checks trivial kernels") {
  AlphaParam a({0.0});
  ScalarKernel inv = [&](const Point& x, const Point& y) { return 1.0 / malpha_ball(a, x, distance(x, y)).exact; };
  ScalarKernel zero = [](const Point&, const Point&) { return 0.0; };
  ScalarKernel one = [](const Point&, const Point&) { return 1.0; };
  std::vector<PairSample> pairs;
  std::vector<TripleSample> triples;
  for (double x = 0.1; x < 4.0; x += 0.37) {
    for (double y = 0.05; y < 4.0; y += 0.41) {
      pairs.push_back({{x}, {y}});
      triples.push_back({{x}, {y}, {x + 0.2 * (y - x)}});
      triples.push_back({{x}, {y}, {x + 0.9 * (y - x)}});
    }
  }
  CHECK(cz_size_check(a, inv, pairs).constant == doctest::Approx(1.0));
  CHECK(cz_size_check(a, zero, pairs).constant == 0.0);
  auto reg0 = cz_regularity_check(a, one, triples);
  CHECK(reg0.constant == 0.0);
  CHECK(reg0.skipped >= static_cast<int>(pairs.size()));
  auto reg = cz_regularity_check(a, inv, triples);
  CHECK(std::isfinite(reg.constant));
  CHECK(reg.constant > 0.0);
}

TEST_CASE("sampled invariants of the quadratic forms") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.0, 6.0), us(-1.0, 1.0);
  AlphaParam a({0.0, 0.5});
  auto params = RegionParams::defaults(a);
  for (int i = 0; i < 5000; ++i) {
    KernelContext c(a, {ux(rng), ux(rng)}, {ux(rng), ux(rng)}, {us(rng), us(rng)});
    const double d = c.x_sq() - c.y_sq();
    CHECK(c.q_plus() * c.q_minus() >= d * d - 1e-12 * c.a() * c.a());
    CHECK(std::abs(c.b()) <= c.a() * (1 + 1e-15));
    if (region_classify(c, RegionParams{1.0, params.c0}) == Region::global) {
      CHECK(c.a() >= 0.5 * c.q_minus());
      CHECK(c.a() > a.homogeneity());
    }
  }
}

TEST_CASE("mu_alpha is a probability measure") {
  for (double al : {0.0, 0.5, 2.0}) {
    AlphaParam a({al});
    auto res = integrate_adaptive([&](double x) { return mualpha_density(a, Point{x}); }, 0.0, INFINITY, 1e-13);
    CHECK(res.value == doctest::Approx(1.0).epsilon(1e-10));
  }
}
