#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lagvar/errors.hpp"
#include "lagvar/operators.hpp"

using namespace lagvar;

namespace {

const AlphaParam kA0({0.0});

double c0_of(const AlphaParam& a) { return RegionParams::defaults(a).c0; }

// random global (x,y,s) for n = 1
std::vector<KernelContext> global_samples(const AlphaParam& al, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 6.0), us(-1.0, 1.0);
  std::vector<KernelContext> out;
  const double c0 = c0_of(al);
  while (static_cast<int>(out.size()) < count) {
    KernelContext ctx(al, {u(rng)}, {u(rng)}, {us(rng)});
    if (region_classify(ctx, RegionParams{1.0, c0}) == Region::global) out.push_back(ctx);
  }
  return out;
}

}  // namespace

TEST_CASE("v(t) analysis") {
  KernelContext zero_b(kA0, {2.0}, {3.0}, {0.0});
  auto r0 = vt_analyze(zero_b, c0_of(kA0));
  CHECK(r0.branch == VtBranch::b_nonpositive);
  CHECK(r0.sup_value == doctest::Approx(std::exp(-9.0)).epsilon(1e-14));
  CHECK(r0.grid_sup <= (1.0 + 1e-6) * std::exp(-9.0));

  // a = 5, b = 3: x = (1, 2)-ish geometry with |x|^2+|y|^2 = 5 and 2 x y s = 3
  KernelContext ab(kA0, {1.0}, {2.0}, {0.75});
  CHECK(ab.a() == doctest::Approx(5.0));
  CHECK(ab.b() == doctest::Approx(3.0));
  // local for the default c0, so the t0 formula is checked through a smaller c0
  auto rab = vt_analyze(ab, 0.5);
  CHECK(rab.t0 == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(rab.u0 == doctest::Approx(0.5 * (4.0 - 1.0 + 4.0)).epsilon(1e-14));
  // v(t0) matches u(t0) = u0
  CHECK(vt_value(ab, rab.t0) == doctest::Approx(std::exp(-rab.u0) / std::pow(rab.t0, 1.0)).epsilon(1e-12));

  // sqrt(q-) = 1.483 sits just under 9/6, so this point is global only for
  // c0 below 8.9; any c0 > 8 is admissible
  KernelContext ex(kA0, {2.0}, {3.0}, {0.9});
  REQUIRE(region_classify(ex, RegionParams{1.0, 8.5}) == Region::global);
  auto rex = vt_analyze(ex, 8.5);
  CHECK(rex.branch == VtBranch::b_positive);
  const double ratio = rex.grid_sup / rex.sup_value;
  CHECK(ratio >= 1.0 / 10.0);
  CHECK(ratio <= 10.0);

  KernelContext loc(kA0, {1.0}, {1.0}, {1.0});
  CHECK_THROWS_AS(vt_analyze(loc, c0_of(kA0)), ConstructionError);
}

TEST_CASE("global maximal bound") {
  auto samples = global_samples(kA0, 300, 17);
  auto rep = global_maximal_bound_check(kA0, samples, c0_of(kA0));
  CHECK(rep.samples == 300);
  CHECK(rep.pass);
  CHECK(std::isfinite(rep.constant));
  CHECK(rep.comparability_fine <= 100.0);
  CHECK(rep.b_nonpositive_excess <= 1e-6);
  KernelContext loc(kA0, {1.0}, {1.0}, {1.0});
  auto rep2 = global_maximal_bound_check(kA0, {loc}, c0_of(kA0));
  CHECK(rep2.rejected == 1);
  CHECK(rep2.samples == 0);
}

TEST_CASE("H kernel") {
  KernelContext s0(kA0, {1.0}, {2.0}, {0.0});
  CHECK(h_kernel(0.3, s0) == doctest::Approx(std::exp(-0.7 * 4.0)).epsilon(1e-15));
  KernelContext ex(kA0, {1.0}, {2.0}, {0.5});
  CHECK(ex.q_plus() == doctest::Approx(7.0));
  CHECK(ex.q_minus() == doctest::Approx(3.0));
  CHECK(h_kernel(0.0, ex) == doctest::Approx(7.0 * std::exp(-(3.0 + std::sqrt(21.0)) / 2.0)).epsilon(1e-14));
  double last = 0.0;
  for (double e = 0.0; e < 0.99; e += 0.05) {
    const double v = h_kernel(e, ex);
    CHECK(v >= last);
    last = v;
  }
  CHECK_THROWS_AS(h_kernel(1.0, ex), DomainError);
  CHECK(default_epsilon(2.0, kA0) == doctest::Approx(0.25));
  CHECK(a_epsilon(0.2, 2.0) == doctest::Approx(0.4 - 0.1));
}

TEST_CASE("H applied to constants") {
  const double c0 = c0_of(kA0);
  auto g = panel_grid(kA0, Measure::m_alpha, 12.0, 48, 12);
  auto one = DiscreteFunction::sample(g, [](const Point&) { return 1.0; });
  TensorGrid out;
  out.measure = Measure::m_alpha;
  out.nodes = {{1.0}};
  out.weights = {{1.0}};
  auto r = h_apply(one, kA0, 0.2, c0, out);
  CHECK(r.epsilon_admissible);
  // nested adaptive oracle in (y, s), s = cos(theta), integrand split at the branch point
  auto inner = [&](double y) {
    auto body = [&](double th) {
      KernelContext ctx(kA0, {1.0}, {y}, {std::cos(th)});
      return h_kernel(0.2, ctx) * (1.0 - cutoff_psi(region_ratio(ctx, c0))) / std::numbers::pi;
    };
    double s = 0.0;
    for (int i = 0; i < 16; ++i) s += integrate_adaptive(body, std::numbers::pi * i / 16, std::numbers::pi * (i + 1) / 16, 1e-11).value;
    return s * y;  // m_0 density
  };
  double oracle = 0.0;
  for (int i = 0; i < 12; ++i) oracle += integrate_adaptive(inner, 1.0 * i, 1.0 * (i + 1), 1e-9).value;
  CHECK(r.value.values[0] > 0.0);
  CHECK(r.value.values[0] == doctest::Approx(oracle).epsilon(1e-6));

  auto zero = DiscreteFunction::sample(g, [](const Point&) { return 0.0; });
  CHECK(h_apply(zero, kA0, 0.2, c0, out).value.values[0] == 0.0);
  CHECK_FALSE(h_apply(one, kA0, 0.9, c0, out).epsilon_admissible);
  auto mu = panel_grid(kA0, Measure::mu_alpha, 5.0, 4, 8);
  CHECK_THROWS_AS(h_apply(DiscreteFunction::sample(mu, [](const Point&) { return 1.0; }), kA0, 0.2, c0, out), DomainError);
}

TEST_CASE("maximal operators on expansions") {
  const auto grid = log_time_grid(1e-4, 50.0, 400);
  auto one = Expansion::single(kA0, {0});
  CHECK(maximal_heat(one, {1.3}, grid) == 1.0);
  for (int k = 1; k <= 4; ++k) {
    auto lk = Expansion::single(kA0, {k});
    for (double x : {0.3, 1.1, 2.0})
      CHECK(maximal_heat(lk, {x}, grid) == doctest::Approx(std::abs(laguerre_value(k, 0.0, x * x))).epsilon(1e-14));
  }
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    Expansion f;
    f.alpha = kA0;
    f.indices = Expansion::indices_up_to(1, 8);
    for (std::size_t i = 0; i < f.indices.size(); ++i) f.coeffs.push_back(nd(rng) / (1.0 + i));
    for (double x = 0.1; x < 3.0; x += 0.4) CHECK(maximal_poisson(f, {x}, grid) <= maximal_heat(f, {x}, grid) + 1e-8);
  }
  CHECK_THROWS_AS(maximal_heat(one, {1.0}, {}), DomainError);
}

TEST_CASE("maximal heat on a grid") {
  auto g = panel_grid(kA0, Measure::mu_alpha, 8.0, 16, 8);
  auto one = DiscreteFunction::sample(g, [](const Point&) { return 1.0; });
  auto m = maximal_heat_on_grid(one, kA0, log_time_grid(0.05, 5.0, 6));
  for (std::size_t i = 0; i < m.values.size(); i += 10) CHECK(m.values[i] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("Riesz transforms, spectral") {
  auto l0 = Expansion::single(kA0, {0});
  CHECK(riesz_spectral(l0, {1}, {0.7}) == 0.0);
  auto l1 = Expansion::single(kA0, {1});
  for (double x : {0.2, 1.0, 2.5}) CHECK(riesz_spectral(l1, {1}, {x}) == doctest::Approx(-2.0 * x).epsilon(1e-14));
  // |R L_1|_2^2 = int (2x)^2 2x e^{-x^2} dx = 4
  auto g = mu_grid_laguerre(kA0, 20);
  auto r = riesz_spectral_on_grid(l1, {1}, g);
  CHECK(classical_norm(r, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(riesz_spectral(l1, {0}, {1.0}), DomainError);
}

TEST_CASE("Riesz kernel matches the derivative of the heat kernel") {
  // D_x W_t by a five-point difference of the closed Bessel form
  auto dxw = [](const AlphaParam& al, double t, double x, double y, int order) {
    const double h = 1e-3 * std::max(x, 0.1);
    auto w = [&](double xx) { return std::exp(heat_kernel_log(al, t, {xx}, {y})); };
    if (order == 1) return (-w(x + 2 * h) + 8 * w(x + h) - 8 * w(x - h) + w(x - 2 * h)) / (12 * h);
    return (-w(x + 2 * h) + 16 * w(x + h) - 30 * w(x) + 16 * w(x - h) - w(x - 2 * h)) / (12 * h * h);
  };
  for (double a : {0.0, 1.0}) {
    AlphaParam al({a});
    for (double t : {0.05, 0.5, 2.0}) {
      for (int b : {1, 2}) {
        const double hd = heat_kernel_dx(al, {b}, t, {0.9}, {1.6});
        CHECK(hd == doctest::Approx(dxw(al, t, 0.9, 1.6, b)).epsilon(1e-6));
      }
    }
  }
  for (int b : {1, 2}) {
    const double x = 0.6, y = 1.7;
    // oracle: t-integral of the difference-quotient derivative
    auto body = [&](double t) { return t <= 0.0 ? 0.0 : std::pow(t, 0.5 * b - 1.0) * dxw(kA0, t, x, y, b); };
    double oracle = 0.0;
    const std::vector<double> cuts{0.0, 0.1, 0.5, 1.0, 3.0, 10.0, 40.0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) oracle += integrate_adaptive(body, cuts[i], cuts[i + 1], 1e-10).value;
    oracle /= std::tgamma(0.5 * b);
    auto rk = riesz_kernel(kA0, {b}, {x}, {y});
    CHECK_FALSE(rk.flagged);
    CHECK(rk.value == doctest::Approx(oracle).epsilon(1e-4));
    CHECK(riesz_kernel(kA0, {b}, {x}, {y}).value == rk.value);
  }
  CHECK_THROWS_AS(riesz_kernel(kA0, {1}, {1.0}, {1.0}), DomainError);
}

TEST_CASE("Riesz spectral vs kernel off the support") {
  // bump supported in [1.8, 3.8] with sup 1; x outside
  auto bump = [](double y) {
    if (y <= 1.8 || y >= 3.8) return 0.0;
    const double s = (y - 1.8) * (3.8 - y);
    return std::exp(2.0 - 2.0 / s);
  };
  auto g = panel_grid(kA0, Measure::mu_alpha, 3.8, 40, 16);
  auto fd = DiscreteFunction::sample(g, [&](const Point& p) { return bump(p[0]); });
  auto f = Expansion::project(fd, kA0, 300);
  for (double x : {0.6, 1.0}) {
    const double spec = riesz_spectral(f, {1}, {x});
    double ker = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double y = g.point(k)[0];
      if (fd.values[k] == 0.0) continue;
      ker += g.weight(k) * fd.values[k] * riesz_kernel(kA0, {1}, {x}, {y}).value;
    }
    CHECK(std::abs(spec - ker) <= 1e-3 * std::max(1.0, std::abs(ker)));
  }
}

TEST_CASE("g-functions") {
  const Point x{0.8};
  CHECK(g_function(Expansion::single(kA0, {0}), {0}, 1, x) == 0.0);
  for (int r = 1; r <= 5; ++r) {
    auto lr = Expansion::single(kA0, {r});
    CHECK(g_function(lr, {0}, 1, x) == doctest::Approx(std::abs(laguerre_value(r, 0.0, 0.64)) / 2.0).epsilon(1e-10));
    for (int k = 1; k <= 3; ++k)
      CHECK(g_function(lr, {0}, k, x) ==
            doctest::Approx(std::abs(laguerre_value(r, 0.0, 0.64)) * std::sqrt(std::tgamma(2.0 * k)) / std::pow(2.0, k)).epsilon(1e-10));
  }
  // mixtures: closed sum over pairs
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 10; ++rep) {
    Expansion f;
    f.alpha = kA0;
    f.indices = Expansion::indices_up_to(1, 10);
    for (std::size_t i = 0; i < f.indices.size(); ++i) f.coeffs.push_back(nd(rng));
    for (int k : {1, 2}) {
      const int m = k + 1;
      std::vector<double> a, mu;
      for (std::size_t i = 1; i < f.indices.size(); ++i) {
        const double l = std::sqrt(static_cast<double>(f.indices[i][0]));
        mu.push_back(l);
        a.push_back(f.coeffs[i] * std::pow(-l, k) * laguerre_tensor_deriv(f.indices[i], kA0, std::vector<int>{1}, x));
      }
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) s += a[i] * a[j] * std::tgamma(2.0 * m) / std::pow(mu[i] + mu[j], 2.0 * m);
      CHECK(g_function(f, {1}, k, x) == doctest::Approx(std::sqrt(s)).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(g_function(Expansion::single(kA0, {1}), {0}, 0, x), DomainError);
}

TEST_CASE("multipliers") {
  auto ip = MultiplierSpec::imaginary_power(0.7);
  CHECK(ip.m(0.0) == std::complex<double>(0.0));
  for (double l : {1.0, 2.0, 7.0}) {
    CHECK(std::abs(ip.m(l)) == doctest::Approx(1.0).epsilon(1e-15));
    // the Laplace form of the same multiplier
    auto as_custom = MultiplierSpec::custom(ip.phi, ip.phi_sup);
    CHECK(std::abs(as_custom.m(l) - ip.m(l)) <= 1e-8);
  }
  // |Gamma(1 - i b)|^2 = pi b / sinh(pi b)
  CHECK(ip.phi_sup * ip.phi_sup == doctest::Approx(std::sinh(0.7 * std::numbers::pi) / (0.7 * std::numbers::pi)).epsilon(1e-12));

  Expansion f;
  f.alpha = kA0;
  f.indices = Expansion::indices_up_to(1, 12);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (std::size_t i = 0; i < f.indices.size(); ++i) f.coeffs.push_back(nd(rng));
  auto t = multiplier_apply(f, ip);
  CHECK(t.coeffs[0] == std::complex<double>(0.0));
  for (std::size_t i = 1; i < f.coeffs.size(); ++i) CHECK(std::abs(t.coeffs[i]) == doctest::Approx(std::abs(f.coeffs[i])).epsilon(1e-15));

  auto one = MultiplierSpec::custom([](double) { return std::complex<double>(1.0); }, 1.0);
  auto t1 = multiplier_apply(f, one);
  CHECK(std::abs(t1.coeffs[0]) == 0.0);
  for (std::size_t i = 1; i < f.coeffs.size(); ++i) CHECK(std::abs(t1.coeffs[i] - f.coeffs[i]) <= 1e-10 * std::abs(f.coeffs[i]));
  auto damp = MultiplierSpec::custom([](double y) { return std::complex<double>(std::cos(y), 0.0); }, 1.0);
  double sup = 0.0;
  for (const auto& k : f.indices) sup = std::max(sup, std::abs(damp.m(index_hat(k))));
  CHECK(multiplier_apply(f, damp).l2_norm() <= sup * f.l2_norm() + 1e-10);
  // lambda / (1 + lambda^2) for phi = cos
  CHECK(std::abs(damp.m(2.0) - 4.0 / 5.0) <= 1e-10);
}

TEST_CASE("multiplier kernel") {
  auto one = MultiplierSpec::custom([](double) { return std::complex<double>(1.0); }, 1.0);
  auto k1 = multiplier_kernel(kA0, one, {0.5}, {1.8});
  CHECK(std::abs(k1.value - std::complex<double>(-1.0)) <= 1e-4);
  auto zero = MultiplierSpec::custom([](double) { return std::complex<double>(0.0); }, 0.0);
  CHECK(multiplier_kernel(kA0, zero, {0.5}, {1.8}).value == std::complex<double>(0.0));
  CHECK_THROWS_AS(multiplier_kernel(kA0, one, {1.0}, {1.0}), DomainError);
}

TEST_CASE("local heat sup kernel") {
  const double c0 = c0_of(kA0);
  const double k1 = local_heat_sup_kernel(kA0, c0, {1.0}, {1.1}, 60);
  const double k2 = local_heat_sup_kernel(kA0, c0, {1.0}, {1.1}, 120);
  CHECK(k1 > 0.0);
  CHECK(std::abs(k2 / k1 - 1.0) <= 1e-3);
  // no local s at all
  CHECK(local_heat_sup_kernel(kA0, c0, {5.0}, {0.2}, 30) == 0.0);
}
