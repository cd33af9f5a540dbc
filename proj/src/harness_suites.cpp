#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "harness_internal.hpp"
#include "lagvar/errors.hpp"
#include "lagvar/harness.hpp"

namespace lagvar {

using detail::alpha_label;
using detail::probe_points;
using detail::sub_seed;

namespace {

constexpr Comparator LE = Comparator::le;
constexpr Comparator GE = Comparator::ge;
constexpr double kFinite = std::numeric_limits<double>::max();

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::isnan(x) ? x : std::max(m, x);
  return m;
}

Point diag(std::size_t n, double v) { return Point(n, v); }

MultiIndex unit_index(std::size_t n) {
  MultiIndex b(n, 0);
  b[0] = 1;
  return b;
}

ExponentField decay_exponent(const ExperimentConfig& cfg, std::size_t n) {
  if (cfg.exponent.kind == "decay_power") return cfg.exponent.build(n);
  return ExponentField::decay_power(2.0, 1.0, 2.0, n);
}

TensorGrid norm_grid(const ExperimentConfig& cfg, const AlphaParam& al) {
  if (al.n() == 1) return panel_grid(al, Measure::mu_alpha, cfg.grid_bound, 20, 12);
  return panel_grid(al, Measure::mu_alpha, cfg.grid_bound, 8, 8);
}

Expansion random_expansion(const AlphaParam& al, int degree, std::mt19937_64& rng, bool mean_zero) {
  std::normal_distribution<double> nd;
  Expansion f;
  f.alpha = al;
  f.indices = Expansion::indices_up_to(al.n(), degree);
  for (const auto& k : f.indices) f.coeffs.push_back(nd(rng) / (1.0 + index_hat(k)));
  if (mean_zero) f.coeffs[0] = 0.0;
  return f;
}

// ---------------------------------------------------------------- specfun

std::vector<ReportRow> suite_orthonormality(const ExperimentConfig& cfg) {
  std::vector<ReportRow> rows;
  const std::vector<std::vector<double>> alphas{{0.0}, {0.5}, {2.0}, {0.0, 1.0}};
  for (const auto& a : alphas) {
    const AlphaParam al(a);
    const auto g = mu_grid_laguerre(al, 16);
    const auto idx = Expansion::indices_up_to(al.n(), 10);
    std::vector<std::vector<double>> vals(idx.size(), std::vector<double>(g.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t p = 0; p < g.size(); ++p) {
        const Point x = g.point(p);
        vals[i][p] = laguerre_tensor(idx[i], al, x);
      }
    std::vector<double> worst(idx.size(), 0.0);
    parallel_for(idx.size(), cfg.threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < idx.size(); ++j) {
        double s = 0.0;
        for (std::size_t p = 0; p < g.size(); ++p) s += g.weight(p) * vals[i][p] * vals[j][p];
        worst[i] = std::max(worst[i], std::abs(s - (i == j ? 1.0 : 0.0)));
      }
    });
    rows.push_back(make_row("c01_orthonormality", 1, "max_gram_error alpha=" + alpha_label(al), max_of(worst),
                            LE, cfg.tol("orthonormality")));
  }
  return rows;
}

std::vector<ReportRow> suite_eigen_identity(const ExperimentConfig& cfg) {
  std::vector<ReportRow> rows;
  for (double a : {0.0, 0.5, 2.0}) {
    double worst = 0.0;
    for (int k = 0; k <= 8; ++k) {
      const auto f = laguerre_normalized(k, a).compose_square();
      // -1/4 (f'' + (2a+1) f'/x - 2x f'), with f' odd
      const auto d1 = f.derivative(1);
      std::vector<double> over_x(std::max<std::size_t>(d1.coeffs().size(), 2) - 1, 0.0);
      for (int j = 1; j <= d1.degree(); ++j) over_x[static_cast<std::size_t>(j - 1)] = d1.coeff(j);
      worst = std::max(worst, std::abs(d1.coeff(0)));
      const auto lhs =
          (f.derivative(2) + PolyCoeffs(over_x).scaled(2 * a + 1) - d1.times_x().scaled(2.0)).scaled(-0.25);
      const auto rhs = f.scaled(k);
      for (int j = 0; j <= std::max(lhs.degree(), rhs.degree()); ++j)
        worst = std::max(worst, std::abs(lhs.coeff(j) - rhs.coeff(j)) / (1.0 + std::abs(rhs.coeff(j))));
    }
    rows.push_back(make_row("c02_eigen_identity", 2, "max_scaled_coeff_error alpha=" + format_double(a), worst, LE,
                            cfg.tol("eigen_identity")));
  }
  return rows;
}

// ---------------------------------------------------------------- geometry

std::vector<ReportRow> suite_quadratic(const ExperimentConfig& cfg) {
  const std::size_t n = static_cast<std::size_t>(cfg.n);
  std::mt19937_64 rng(sub_seed(cfg.seed, "c07_quadratic_inequality"));
  std::uniform_real_distribution<double> ux(0.0, 6.0), us(-1.0, 1.0);
  double worst = -kFinite;
  int violations = 0;
  Point x(n), y(n), s(n);
  for (int i = 0; i < cfg.samples_quadratic; ++i) {
    for (std::size_t d = 0; d < n; ++d) {
      x[d] = ux(rng);
      y[d] = ux(rng);
      s[d] = us(rng);
    }
    const auto q = q_forms(x, y, s);
    const double xs = dot(x, x), ys = dot(y, y);
    const double scale = (xs + ys) * (xs + ys);
    const double excess = ((xs - ys) * (xs - ys) - q.q_plus * q.q_minus) / std::max(scale, 1e-300);
    worst = std::max(worst, excess);
    if (excess > cfg.tol("quadratic_inequality")) ++violations;
  }
  return {make_row("c07_quadratic_inequality", 7, "max_scaled_excess", worst, LE, cfg.tol("quadratic_inequality")),
          make_row("c07_quadratic_inequality", 7, "violations", violations, LE, 0.0)};
}

// ---------------------------------------------------------------- varlp

std::vector<ReportRow> suite_luxemburg(const ExperimentConfig& cfg) {
  const AlphaParam al = cfg.alpha_param();
  const auto g = norm_grid(cfg, al);
  const auto fams = detail::test_families(cfg, al);
  std::vector<DiscreteFunction> fs;
  for (const auto& tf : fams) fs.push_back(DiscreteFunction::sample(g, tf.f));

  std::vector<double> cl(fs.size(), 0.0), um(fs.size(), 0.0);
  const auto p = decay_exponent(cfg, al.n());
  parallel_for(fs.size(), cfg.threads, [&](std::size_t i) {
    for (double pc : {1.5, 2.0, 3.0}) {
      const double lux = luxemburg_norm(fs[i], ExponentField::constant(pc, al.n())).norm;
      cl[i] = std::max(cl[i], rel(lux, classical_norm(fs[i], pc)));
    }
    um[i] = std::abs(luxemburg_norm(fs[i], p).modular_at_norm - 1.0);
  });
  return {make_row("c12_luxemburg_classical", 12, "max_rel_diff p=1.5;2;3", max_of(cl), LE,
                   cfg.tol("luxemburg_classical")),
          make_row("c12_unit_modular", 12, "max_abs_residual", max_of(um), LE, cfg.tol("unit_modular"))};
}

std::vector<ReportRow> suite_holder(const ExperimentConfig& cfg) {
  const AlphaParam al = cfg.alpha_param();
  const auto g = norm_grid(cfg, al);
  const auto p = decay_exponent(cfg, al.n());
  struct Params {
    double a, b, c, d, e;
  };
  std::mt19937_64 rng(sub_seed(cfg.seed, "c12_holder"));
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<Params> ps(static_cast<std::size_t>(cfg.samples_holder));
  for (auto& q : ps) q = {u(rng), u(rng), u(rng), u(rng), u(rng)};
  std::vector<double> ratio(ps.size(), 0.0);
  parallel_for(ps.size(), cfg.threads, [&](std::size_t i) {
    const auto& q = ps[i];
    auto f = DiscreteFunction::sample(g, [&](const Point& x) {
      double r2 = 0.0;
      for (double xi : x) r2 += (xi - q.b) * (xi - q.b);
      return std::exp(-q.a * r2) + q.c - 1.5;
    });
    auto h = DiscreteFunction::sample(g, [&](const Point& x) {
      return 1.0 + q.d * x[0] * std::exp(-q.e * norm2(x)) - 0.5 * q.c;
    });
    ratio[i] = holder_check(f, h, p).ratio;
  });
  return {make_row("c12_holder", 12, "max_lhs_over_2_norm_product", max_of(ratio), LE, cfg.tol("holder"))};
}

std::vector<Point> class_probes() {
  std::vector<Point> probes;
  for (int i = 0; i <= 4000; ++i) probes.push_back({0.05 * i});
  return probes;
}

std::vector<ReportRow> suite_class_constants(const ExperimentConfig& cfg) {
  const auto p = decay_exponent(cfg, 1);
  const auto probes = class_probes();
  const std::vector<Point> near(probes.begin(), probes.begin() + 200);
  std::vector<ReportRow> rows;
  rows.push_back(make_row("c12_class_constants", 12, "Pe_inf", class_constants(p, ExponentClass::Pe_inf, probes).constant,
                          LE, kFinite));
  rows.push_back(make_row("c12_class_constants", 12, "LH_inf", class_constants(p, ExponentClass::LHinf, probes).constant,
                          LE, kFinite));
  rows.push_back(make_row("c12_class_constants", 12, "LH_0", class_constants(p, ExponentClass::LH0, near).constant, LE,
                          kFinite));

  const auto lifted = lift_exponent_radial(p, {2});
  rows.push_back(make_row("c12_radial_lift", 12, "abs_diff p_minus", std::abs(lifted.p_minus() - p.p_minus()), LE, 0.0));
  rows.push_back(make_row("c12_radial_lift", 12, "abs_diff p_plus", std::abs(lifted.p_plus() - p.p_plus()), LE, 0.0));
  std::vector<Point> radial;
  for (const auto& b : probes) radial.push_back({b[0] * std::cos(0.7), b[0] * std::sin(0.7)});
  const std::vector<Point> radial_near(radial.begin(), radial.begin() + 200);
  for (auto [c, name] : {std::pair{ExponentClass::LHinf, "LH_inf"}, std::pair{ExponentClass::Pe_inf, "Pe_inf"}}) {
    const double base = class_constants(p, c, probes).constant;
    const double lift = class_constants(lifted, c, radial).constant;
    rows.push_back(make_row("c12_radial_lift", 12, std::string("rel_diff ") + name, rel(lift, base), LE,
                            cfg.tol("lift_class_constants")));
  }
  const double lh0 = class_constants(p, ExponentClass::LH0, near).constant;
  const double lh0_lift = class_constants(lifted, ExponentClass::LH0, radial_near).constant;
  rows.push_back(make_row("c12_radial_lift", 12, "lifted_minus_base LH_0", lh0_lift - lh0, LE,
                          cfg.tol("lift_class_constants")));
  return rows;
}

// ---------------------------------------------------------------- semigroup

HeatEval heat_eval(const AlphaParam& al, double t, HeatMethod m = HeatMethod::bessel_product) {
  HeatEval e{al, t, m};
  return e;
}

std::vector<ReportRow> suite_hille_hardy(const ExperimentConfig& cfg) {
  const AlphaParam al = cfg.alpha_param();
  const std::size_t n = al.n();
  const std::vector<double> ts{0.05, 0.1, 0.5, 1.0, 2.0};
  std::vector<double> w_si(100, 0.0), w_sp(100, 0.0);
  parallel_for(100, cfg.threads, [&](std::size_t c) {
    const int i = static_cast<int>(c / 10), j = static_cast<int>(c % 10);
    Point x(n), y(n);
    for (std::size_t d = 0; d < n; ++d) {
      x[d] = 0.1 + 0.3 * i + 0.05 * static_cast<double>(d);
      y[d] = 0.15 + 0.3 * j + 0.07 * static_cast<double>(d);
    }
    for (double t : ts) {
      const double bp = heat_kernel(heat_eval(al, t), x, y).value;
      w_si[c] = std::max(w_si[c], rel(heat_kernel(heat_eval(al, t, HeatMethod::s_integral), x, y).value, bp));
      if (t >= 0.5)
        w_sp[c] = std::max(w_sp[c], rel(heat_kernel(heat_eval(al, t, HeatMethod::spectral), x, y).value, bp));
    }
  });
  return {make_row("c03_hille_hardy", 3, "max_rel s_integral vs bessel_product", max_of(w_si), LE,
                   cfg.tol("hille_hardy_s_integral")),
          make_row("c03_hille_hardy", 3, "max_rel spectral(K=60) vs bessel_product t>=0.5", max_of(w_sp), LE,
                   cfg.tol("hille_hardy_spectral"))};
}

std::vector<ReportRow> suite_conservation(const ExperimentConfig& cfg) {
  const AlphaParam al = cfg.alpha_param();
  const std::size_t n = al.n();
  const auto g = n == 1 ? panel_grid(al, Measure::mu_alpha, 9.0, 60, 16) : panel_grid(al, Measure::mu_alpha, 9.0, 30, 16);
  std::vector<std::pair<double, double>> cells;
  for (double t : {0.05, 0.5, 2.0})
    for (double x : {0.2, 1.0, 2.5}) cells.emplace_back(t, x);
  std::vector<double> dev(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto [t, xv] = cells[c];
    const Point x = diag(n, xv);
    const auto e = heat_eval(al, t);
    std::vector<double> terms(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) terms[k] = g.weight(k) * heat_kernel(e, x, g.point(k)).value;
    dev[c] = std::abs(pairwise_sum(terms) - 1.0);
  });

  // contraction in L^2 on seeded functions
  const auto cg = n == 1 ? panel_grid(al, Measure::mu_alpha, 7.0, 28, 12) : panel_grid(al, Measure::mu_alpha, 7.0, 8, 8);
  const int count = n == 1 ? cfg.samples_functions : std::min(cfg.samples_functions, 10);
  std::mt19937_64 rng(sub_seed(cfg.seed, "c04_contraction"));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::array<double, 3>> cs(static_cast<std::size_t>(count));
  for (auto& c : cs) c = {u(rng), u(rng), u(rng)};
  std::vector<double> excess(cs.size());
  parallel_for(cs.size(), cfg.threads, [&](std::size_t i) {
    const auto c = cs[i];
    auto h = DiscreteFunction::sample(cg, [&](const Point& x) {
      return c[0] + c[1] * std::sin(2.0 * x[0]) + c[2] * std::exp(-norm2(x));
    });
    auto wh = heat_apply_on_grid(h, heat_eval(al, 0.4));
    excess[i] = classical_norm(wh, 2.0) / classical_norm(h, 2.0) - 1.0;
  });
  return {make_row("c04_conservation", 4, "max_abs W_t1-1", max_of(dev), LE, cfg.tol("conservation")),
          make_row("c04_contraction", 4, "max_l2_ratio_minus_one t=0.4", *std::max_element(excess.begin(), excess.end()),
                   LE, cfg.tol("contraction"))};
}

std::vector<ReportRow> suite_semigroup_law(const ExperimentConfig& cfg) {
  const AlphaParam al = cfg.alpha_param();
  const std::size_t n = al.n();
  const auto g = n == 1 ? panel_grid(al, Measure::mu_alpha, 8.0, 48, 16) : panel_grid(al, Measure::mu_alpha, 8.0, 8, 8);
  auto f = DiscreteFunction::sample(g, [](const Point& x) {
    double r2 = 0.0;
    for (double xi : x) r2 += (xi - 1.0) * (xi - 1.0);
    return std::exp(-r2) + 0.3 * x[0];
  });
  const auto probes = probe_points(n, 0.1, 3.0, 10);
  std::vector<std::pair<double, double>> cells;
  for (double t : {0.1, 0.5, 1.0})
    for (double s : {0.1, 0.5, 1.0}) cells.emplace_back(t, s);
  std::vector<double> dev(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto [t, s] = cells[c];
    auto ws = heat_apply_on_grid(f, heat_eval(al, s));
    auto lhs = heat_apply(ws, heat_eval(al, t), probes);
    auto rhs = heat_apply(f, heat_eval(al, t + s), probes);
    double w = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i) w = std::max(w, std::abs(lhs[i] - rhs[i]));
    dev[c] = w;
  });
  return {make_row("c05_semigroup_law", 5, "max_probe_dev (t;s) in {0.1;0.5;1}^2", max_of(dev), LE,
                   cfg.tol("semigroup_law"))};
}

std::vector<ReportRow> suite_subordination(const ExperimentConfig& cfg) {
  const AlphaParam al = cfg.alpha_param();
  const std::size_t n = al.n();
  std::mt19937_64 rng(sub_seed(cfg.seed, "c06_subordination"));
  const Expansion f = random_expansion(al, 10, rng, false);
  const auto g = n == 1 ? panel_grid(al, Measure::mu_alpha, 9.0, 60, 16) : panel_grid(al, Measure::mu_alpha, 8.0, 16, 10);
  const auto fd = f.sample(g);
  const auto rule = SubordinationRule::log_panel();
  std::vector<std::pair<double, double>> cells;
  for (double t : {0.5, 1.0, 2.0})
    for (double x : {0.3, 0.8, 1.5, 2.2}) cells.emplace_back(t, x);
  std::vector<double> dev(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto [t, xv] = cells[c];
    const Point x = diag(n, xv);
    std::vector<double> terms(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
      terms[k] = g.weight(k) * poisson_kernel(al, t, x, g.point(k), rule).value * fd.values[k];
    dev[c] = std::abs(pairwise_sum(terms) - f.poisson(t, x));
  });

  const auto probes = probe_points(n, 0.05, 3.0, 30);
  const auto tg = log_time_grid(1e-3, 50.0, 200);
  std::vector<double> gap(probes.size());
  parallel_for(probes.size(), cfg.threads, [&](std::size_t i) {
    gap[i] = maximal_poisson(f, probes[i], tg) - maximal_heat(f, probes[i], tg);
  });
  return {make_row("c06_subordination", 6, "max_abs kernel_poisson - spectral_poisson", max_of(dev), LE,
                   cfg.tol("subordination")),
          make_row("c06_subordination", 6, "max P_star - W_star", *std::max_element(gap.begin(), gap.end()), LE,
                   cfg.tol("poisson_below_heat"))};
}

std::vector<ReportRow> suite_derivative_structure(const ExperimentConfig& cfg) {
  const AlphaParam al = cfg.alpha_param();
  const std::size_t n = al.n();
  std::mt19937_64 rng(sub_seed(cfg.seed, "c14_derivative_structure"));
  std::uniform_real_distribution<double> u(0.0, 3.0), us(-1.0, 1.0);
  std::vector<KernelContext> ctxs;
  for (int i = 0; i < cfg.samples_derivative; ++i) {
    Point x(n), y(n), s(n);
    for (std::size_t d = 0; d < n; ++d) {
      x[d] = u(rng);
      y[d] = u(rng);
      s[d] = us(rng);
    }
    ctxs.emplace_back(al, x, y, s);
  }
  std::vector<double> res(ctxs.size()), sc(ctxs.size());
  parallel_for(ctxs.size(), cfg.threads, [&](std::size_t i) {
    const auto d = derivative_structure_check(ctxs[i]);
    res[i] = d.fit_residual;
    sc[i] = d.sign_changes;
  });
  return {make_row("c14_derivative_structure", 14, "max_fit_residual", max_of(res), LE, cfg.tol("derivative_fit")),
          make_row("c14_derivative_structure", 14, "max_sign_changes", max_of(sc), LE,
                   cfg.tol("derivative_sign_changes"))};
}

// ---------------------------------------------------------------- operators

std::vector<ReportRow> suite_maximal_analysis(const ExperimentConfig& cfg) {
  const AlphaParam al = cfg.alpha_param();
  const std::size_t n = al.n();
  const double c0 = RegionParams::defaults(al).c0;
  std::mt19937_64 rng(sub_seed(cfg.seed, "c08_maximal_analysis"));
  std::uniform_real_distribution<double> u(0.0, 6.0), us(-1.0, 1.0);
  std::vector<KernelContext> samples;
  while (static_cast<int>(samples.size()) < cfg.samples_maximal) {
    Point x(n), y(n), s(n);
    for (std::size_t d = 0; d < n; ++d) {
      x[d] = u(rng);
      y[d] = u(rng);
      s[d] = us(rng);
    }
    KernelContext ctx(al, x, y, s);
    if (region_classify(ctx, RegionParams{1.0, c0}) == Region::global) samples.push_back(std::move(ctx));
  }
  // split into chunks so threads help; constants combine by max
  const std::size_t chunks = 8;
  std::vector<MaximalBoundReport> reps(chunks);
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    std::vector<KernelContext> part;
    for (std::size_t i = c; i < samples.size(); i += chunks) part.push_back(samples[i]);
    reps[c] = global_maximal_bound_check(al, part, c0, cfg.vt_points);
  });
  double excess = 0.0, comp = 0.0, comp_fine = 0.0, h = 0.0, h_fine = 0.0;
  int used = 0;
  for (const auto& r : reps) {
    used += r.samples;
    excess = std::max(excess, r.b_nonpositive_excess);
    comp = std::max(comp, r.comparability);
    comp_fine = std::max(comp_fine, r.comparability_fine);
    h = std::max(h, r.constant);
    h_fine = std::max(h_fine, r.constant_fine);
  }
  const auto drift = [](double fine, double coarse) {
    if (fine == 0.0 && coarse == 0.0) return 0.0;
    return std::abs(fine / coarse - 1.0);
  };
  const std::string id = "c08_maximal_analysis";
  return {make_row(id, 8, "G1_samples", used, GE, cfg.samples_maximal),
          make_row(id, 8, "b_nonpositive max grid_sup*e^|y|^2-1", excess, LE, cfg.tol("vt_b_nonpositive")),
          make_row(id, 8, "b_positive comparability constant", comp_fine, LE, cfg.tol("vt_comparability")),
          make_row(id, 8, "b_positive comparability refinement drift", drift(comp_fine, comp), LE,
                   cfg.tol("vt_refinement")),
          make_row(id, 8, "heat_max over H constant", h_fine, LE, kFinite),
          make_row(id, 8, "heat_max over H refinement drift", drift(h_fine, h), LE, cfg.tol("vt_refinement"))};
}

std::vector<ReportRow> suite_g_function(const ExperimentConfig& cfg) {
  const AlphaParam al({0.0});
  const auto g = mu_grid_laguerre(al, 40);
  double first = 0.0, general = 0.0;
  for (int r = 1; r <= 5; ++r) {
    const auto f = Expansion::single(al, {r});
    for (int k = 1; k <= 3; ++k) {
      auto gv = DiscreteFunction::sample(g, [&](const Point& x) { return g_function(f, {0}, k, x); });
      const double norm = classical_norm(gv, 2.0);
      const double expect = std::sqrt(std::tgamma(2.0 * k)) / std::pow(2.0, k);
      if (k == 1) first = std::max(first, std::abs(norm - 0.5));
      general = std::max(general, std::abs(norm - expect));
    }
  }
  return {make_row("c09_g_function", 9, "max |norm g^1(L_r)| - 1/2| r=1..5", first, LE, cfg.tol("g_function_first")),
          make_row("c09_g_function", 9, "max |norm g^k(L_r)| - sqrt(Gamma(2k))/2^k| k=1..3", general, LE,
                   cfg.tol("g_function_general"))};
}

std::vector<ReportRow> suite_riesz(const ExperimentConfig& cfg) {
  std::vector<ReportRow> rows;
  const std::string id = "c10_riesz";
  // exact coefficients: |k|^{-1/2} d/dx L_1(x^2) = -2x for alpha = 0
  {
    const auto p = laguerre_normalized(1, 0.0).compose_square().derivative();
    const double err = std::max({std::abs(p.coeff(0)), std::abs(p.coeff(1) + 2.0), p.degree() > 1 ? 1.0 : 0.0});
    rows.push_back(make_row(id, 10, "coeff_error R L_1 vs -2x", err, LE, cfg.tol("riesz_exact")));
    const AlphaParam a0({0.0});
    const auto l1 = Expansion::single(a0, {1});
    double worst = 0.0;
    for (double x = 0.0; x <= 5.0; x += 0.25) worst = std::max(worst, std::abs(riesz_spectral(l1, {1}, {x}) + 2.0 * x));
    rows.push_back(make_row(id, 10, "max_abs R L_1(x)+2x on probes", worst, LE, cfg.tol("riesz_exact")));
  }
  // L^2 ratios under truncation 10 and 20
  {
    const AlphaParam al = cfg.alpha_param();
    const auto g = mu_grid_laguerre(al, al.n() == 1 ? cfg.laguerre_order : 24);
    const auto beta = unit_index(al.n());
    std::mt19937_64 rng(sub_seed(cfg.seed, "c10_riesz_ratio"));
    std::vector<Expansion> full;
    for (int i = 0; i < cfg.samples_riesz; ++i) full.push_back(random_expansion(al, 20, rng, false));
    std::vector<double> r10(full.size()), r20(full.size());
    parallel_for(full.size(), cfg.threads, [&](std::size_t i) {
      for (int trunc : {10, 20}) {
        Expansion f = full[i];
        for (std::size_t j = 0; j < f.indices.size(); ++j)
          if (index_hat(f.indices[j]) > trunc) f.coeffs[j] = 0.0;
        const double ratio = classical_norm(riesz_spectral_on_grid(f, beta, g), 2.0) / f.l2_norm();
        (trunc == 10 ? r10 : r20)[i] = ratio;
      }
    });
    const double c10 = max_of(r10), c20 = max_of(r20);
    rows.push_back(make_row(id, 10, "l2 constant truncation 10", c10, LE, kFinite));
    rows.push_back(make_row(id, 10, "l2 constant truncation 20", c20, LE, kFinite));
    rows.push_back(make_row(id, 10, "l2 constant drift 10 to 20", std::abs(c20 / c10 - 1.0), LE,
                            cfg.tol("riesz_truncation_drift")));
  }
  // spectral vs kernel away from the support of a bump on [1.8, 3.8]
  {
    const AlphaParam a1({cfg.alpha[0]});
    auto bump = [](double y) {
      if (y <= 1.8 || y >= 3.8) return 0.0;
      return std::exp(2.0 - 2.0 / ((y - 1.8) * (3.8 - y)));
    };
    const auto g = panel_grid(a1, Measure::mu_alpha, 3.8, 40, 16);
    const auto fd = DiscreteFunction::sample(g, [&](const Point& p) { return bump(p[0]); });
    const auto f = Expansion::project(fd, a1, 300);
    double worst = 0.0;
    for (double x : {0.6, 1.0}) {
      const double spec = riesz_spectral(f, {1}, {x});
      std::vector<double> terms(g.size(), 0.0);
      parallel_for(g.size(), cfg.threads, [&](std::size_t k) {
        if (fd.values[k] == 0.0) return;
        terms[k] = g.weight(k) * fd.values[k] * riesz_kernel(a1, {1}, {x}, g.point(k)).value;
      });
      const double ker = pairwise_sum(terms);
      worst = std::max(worst, std::abs(spec - ker) / std::max(1.0, std::abs(ker)));
    }
    rows.push_back(make_row(id, 10, "spectral vs kernel off support", worst, LE, cfg.tol("riesz_kernel_agreement")));
  }
  return rows;
}

std::vector<ReportRow> suite_multiplier(const ExperimentConfig& cfg) {
  const AlphaParam al = cfg.alpha_param();
  std::mt19937_64 rng(sub_seed(cfg.seed, "c11_multiplier"));
  const std::string id = "c11_multiplier";
  double modulus = 0.0, identity = 0.0, sup_excess = -kFinite;
  const auto ip = MultiplierSpec::imaginary_power(cfg.multiplier_beta);
  const auto one = MultiplierSpec::custom([](double) { return std::complex<double>(1.0); }, 1.0);
  const auto damp = MultiplierSpec::custom([](double y) { return std::complex<double>(std::cos(y), 0.0); }, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    const Expansion f = random_expansion(al, 12, rng, false);
    const auto t = multiplier_apply(f, ip);
    const auto t1 = multiplier_apply(f, one);
    identity = std::max(identity, std::abs(t1.coeffs[0]));
    for (std::size_t i = 1; i < f.coeffs.size(); ++i) {
      modulus = std::max(modulus, std::abs(std::abs(t.coeffs[i]) - std::abs(f.coeffs[i])) / std::abs(f.coeffs[i]));
      identity = std::max(identity, std::abs(t1.coeffs[i] - f.coeffs[i]) / std::abs(f.coeffs[i]));
    }
    for (const auto* spec : {&ip, &damp}) {
      double sup = 0.0;
      for (const auto& k : f.indices)
        if (index_hat(k) > 0) sup = std::max(sup, std::abs(spec->m(index_hat(k))));
      sup_excess = std::max(sup_excess, multiplier_apply(f, *spec).l2_norm() - sup * f.l2_norm());
    }
  }
  return {make_row(id, 11, "max rel modulus change imaginary power", modulus, LE, cfg.tol("multiplier_modulus")),
          make_row(id, 11, "max rel error phi=1 vs f-c0", identity, LE, cfg.tol("multiplier_identity")),
          make_row(id, 11, "max norm(T_m f) - sup|m| norm(f)", sup_excess, LE, cfg.tol("multiplier_sup_bound"))};
}

std::vector<ReportRow> suite_cz(const ExperimentConfig& cfg) {
  const AlphaParam a1({cfg.alpha[0]});
  const double c0 = RegionParams::defaults(a1).c0;
  std::mt19937_64 rng(sub_seed(cfg.seed, "c13_cz"));
  std::uniform_real_distribution<double> ux(0.05, 4.0), ul(std::log(0.01), 0.0), uxi(0.05, 0.45), coin(0.0, 1.0);
  std::vector<PairSample> pairs;
  std::vector<TripleSample> triples;
  while (static_cast<int>(pairs.size()) < cfg.samples_cz) {
    const double x = ux(rng);
    const double d = std::exp(ul(rng)) / (1.0 + x) * (coin(rng) < 0.5 ? -1.0 : 1.0);
    const double xi = uxi(rng) * (coin(rng) < 0.5 ? -1.0 : 1.0);
    const double y = x + d, z = x + xi * d;
    if (y <= 0.0 || z <= 0.0) continue;
    pairs.push_back({{x}, {y}});
    triples.push_back({{x}, {y}, {z}});
  }
  const std::size_t half = pairs.size() / 2;
  auto run_level = [&](int points, std::size_t count) {
    // tabulate the kernel in parallel, then feed the sequential checks
    std::vector<double> kxy(count), kzy(count);
    parallel_for(count, cfg.threads, [&](std::size_t i) {
      kxy[i] = local_heat_sup_kernel(a1, c0, pairs[i].x, pairs[i].y, points);
      kzy[i] = local_heat_sup_kernel(a1, c0, triples[i].z, triples[i].y, points);
    });
    std::vector<PairSample> ps(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(count));
    std::vector<TripleSample> ts(triples.begin(), triples.begin() + static_cast<std::ptrdiff_t>(count));
    auto lookup = [&](const Point& x, const Point& y) {
      for (std::size_t i = 0; i < count; ++i) {
        if (pairs[i].x == x && pairs[i].y == y) return kxy[i];
        if (triples[i].z == x && triples[i].y == y) return kzy[i];
      }
      return local_heat_sup_kernel(a1, c0, x, y, points);
    };
    return std::pair{cz_size_check(a1, lookup, ps), cz_regularity_check(a1, lookup, ts)};
  };
  const auto [size0, reg0] = run_level(cfg.cz_t_points, half);
  const auto [size1, reg1] = run_level(2 * cfg.cz_t_points, pairs.size());
  const auto size = cz_refine(size0, size1, cfg.tol("cz_drift"));
  const auto reg = cz_refine(reg0, reg1, cfg.tol("cz_drift"));
  const std::string id = "c13_cz_local_heat_max";
  return {make_row(id, 13, "size constant", size.constant, LE, kFinite),
          make_row(id, 13, "size refinement drift", std::abs(size.refinement_ratio - 1.0), LE, cfg.tol("cz_drift")),
          make_row(id, 13, "regularity constant", reg.constant, LE, kFinite),
          make_row(id, 13, "regularity refinement drift", std::abs(reg.refinement_ratio - 1.0), LE,
                   cfg.tol("cz_drift"))};
}

std::vector<ReportRow> suite_norm_ratios(const ExperimentConfig& cfg) {
  const auto table = operator_ratios(cfg);
  std::vector<ReportRow> rows;
  const std::string id = "c15_norm_ratio";
  const std::string target = cfg.exponent.id();
  for (const auto& r : table) {
    if (r.grid != 1) continue;
    const std::string tag = r.op + " " + r.family + " " + r.exponent;
    if (r.op == "identity") {
      rows.push_back(make_row(id, 15, "identity |ratio-1| " + r.family + " " + r.exponent, std::abs(r.estimate - 1.0),
                              LE, cfg.tol("identity_ratio")));
    } else if (r.op == "multiplier_phi1") {
      if (r.family == "laguerre_mean_zero" && r.exponent == "constant:p=2")
        rows.push_back(make_row(id, 15, "multiplier phi=1 mean-zero L2 ratio-1", r.estimate - 1.0, LE,
                                cfg.tol("plancherel_ratio")));
    } else if (r.exponent == target) {
      rows.push_back(make_row(id, 15, "drift " + tag, std::abs(r.refinement_ratio - 1.0), LE,
                              cfg.tol("norm_ratio_drift")));
      if (r.op == "maximal_heat" && r.family == "constant")
        rows.push_back(make_row(id, 15, "maximal_heat constant |ratio-1|", std::abs(r.estimate - 1.0), LE, 0.0));
    }
  }
  return rows;
}

}  // namespace

std::vector<Suite> select_suites(const ExperimentConfig& cfg) {
  std::vector<Suite> all{
      {"c01_orthonormality", "specfun", 1, suite_orthonormality},
      {"c02_eigen_identity", "specfun", 2, suite_eigen_identity},
      {"c07_quadratic_inequality", "geometry", 7, suite_quadratic},
      {"c12_luxemburg", "varlp", 12, suite_luxemburg},
      {"c12_holder", "varlp", 12, suite_holder},
      {"c12_class_constants", "varlp", 12, suite_class_constants},
  };
  const bool any = !cfg.operators.empty();
  if (any) {
    all.push_back({"c03_hille_hardy", "semigroup", 3, suite_hille_hardy});
    all.push_back({"c04_conservation", "semigroup", 4, suite_conservation});
    all.push_back({"c05_semigroup_law", "semigroup", 5, suite_semigroup_law});
    all.push_back({"c06_subordination", "semigroup", 6, suite_subordination});
    all.push_back({"c14_derivative_structure", "semigroup", 14, suite_derivative_structure});
  }
  if (cfg.has_operator("maximal_heat")) {
    all.push_back({"c08_maximal_analysis", "operators", 8, suite_maximal_analysis});
    all.push_back({"c13_cz_local_heat_max", "operators", 13, suite_cz});
  }
  if (cfg.has_operator("g_function")) all.push_back({"c09_g_function", "operators", 9, suite_g_function});
  if (cfg.has_operator("riesz")) all.push_back({"c10_riesz", "operators", 10, suite_riesz});
  if (cfg.has_operator("multiplier")) all.push_back({"c11_multiplier", "operators", 11, suite_multiplier});
  if (any) all.push_back({"c15_norm_ratio", "operators", 15, suite_norm_ratios});

  std::vector<Suite> out;
  for (auto& s : all)
    if (detail::glob_match(cfg.filter, s.id)) out.push_back(std::move(s));
  std::sort(out.begin(), out.end(), [](const Suite& a, const Suite& b) { return a.id < b.id; });
  return out;
}

}  // namespace lagvar
