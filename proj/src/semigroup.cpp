#include "lagvar/semigroup.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "lagvar/errors.hpp"

namespace lagvar {

std::string to_string(HeatMethod m) {
  switch (m) {
    case HeatMethod::bessel_product: return "bessel-product";
    case HeatMethod::spectral: return "spectral";
    case HeatMethod::s_integral: return "s-integral";
  }
  return "unknown";
}

namespace {

void check_point(const AlphaParam& alpha, const Point& x, const char* what) {
  if (x.size() != alpha.n()) throw DimensionError(std::string(what) + ": dimension mismatch");
}

void check_time(double t) {
  if (!(t > 0.0)) throw DomainError("heat kernel requires t > 0");
}

const QuadratureRule& jacobi_rule(int order, double a) {
  return cached_gauss_jacobi(order, a - 0.5, a - 0.5);
}

// log of Gamma(a+1) / (Gamma(a+1/2) sqrt(pi)), the normalizer of Pi_alpha
double log_pi_alpha_const(double a) {
  return log_gamma(a + 1.0) - log_gamma(a + 0.5) - 0.5 * std::log(std::numbers::pi);
}

struct Coord {
  double e_half;  // e^{-t/2}
  double d;       // 1 - e^{-t}
  double kappa;   // 2 e^{-t/2} x y / (1 - e^{-t})
  double log_pref;  // kappa - e^{-t}(x^2+y^2)/(1-e^{-t}), symmetric in x, y
};

Coord coord(double t, double x, double y) {
  Coord c;
  c.e_half = std::exp(-0.5 * t);
  c.d = -std::expm1(-t);
  c.kappa = 2.0 * c.e_half * x * y / c.d;
  const double diff = x - y;
  c.log_pref = -c.e_half * c.e_half * diff * diff / c.d + 2.0 * c.e_half * x * y / (1.0 + c.e_half);
  return c;
}

int auto_order(double kappa) {
  const int o = static_cast<int>(std::ceil(24.0 + 6.0 * std::sqrt(std::max(kappa, 0.0))));
  // round up to a multiple of 8 so cached rules are shared
  return std::min(400, (o + 7) / 8 * 8);
}

}  // namespace

double heat_kernel_log(const AlphaParam& alpha, double t, const Point& x, const Point& y) {
  check_time(t);
  double total = 0.0;
  for (std::size_t j = 0; j < alpha.n(); ++j) {
    const double a = alpha[j];
    const Coord c = coord(t, x[j], y[j]);
    total += alpha.log_normalizer(j) - (a + 1.0) * std::log(c.d) + std::log(bessel_i_reduced(a, c.kappa)) +
             c.log_pref;
  }
  return total;
}

double heat_kernel_dt(const AlphaParam& alpha, double t, const Point& x, const Point& y) {
  check_time(t);
  check_point(alpha, x, "heat_kernel_dt");
  check_point(alpha, y, "heat_kernel_dt");
  double dlog = 0.0;
  const double e = std::exp(-t);
  const double d = -std::expm1(-t);
  for (std::size_t j = 0; j < alpha.n(); ++j) {
    const double a = alpha[j];
    const double xy = x[j] * y[j];
    const double z = 2.0 * std::sqrt(e) * xy / d;
    const double rho = z > 0.0 ? bessel_i_ratio(a, z) : 0.0;
    dlog += -(a + 1.0) * e / d + (x[j] * x[j] + y[j] * y[j]) * e / (d * d) -
            rho * xy * std::sqrt(e) * (1.0 + e) / (d * d);
  }
  return std::exp(heat_kernel_log(alpha, t, x, y)) * dlog;
}

namespace {

// values[i][k] = L_k^{alpha_i}(x_i^2), k = 0..kmax
std::vector<std::vector<double>> laguerre_table(const AlphaParam& alpha, const Point& x, int kmax) {
  std::vector<std::vector<double>> tab(alpha.n());
  for (std::size_t i = 0; i < alpha.n(); ++i) {
    const double a = alpha[i], u = x[i] * x[i];
    auto& row = tab[i];
    row.resize(static_cast<std::size_t>(kmax) + 1);
    // classical recurrence with the normalizing factor carried along
    double prev = 0.0, cur = 1.0;
    double log_scale = 0.0;  // log sqrt(Gamma(a+1) k! / Gamma(a+k+1))
    row[0] = 1.0;
    for (int k = 0; k < kmax; ++k) {
      const double next = ((2.0 * k + 1.0 + a - u) * cur - (k + a) * prev) / (k + 1.0);
      prev = cur;
      cur = next;
      log_scale += 0.5 * (std::log(k + 1.0) - std::log(a + k + 1.0));
      row[static_cast<std::size_t>(k) + 1] = cur * std::exp(log_scale);
    }
  }
  return tab;
}

template <class F>
void for_each_multi_index(std::size_t n, int lo, int hi, F&& f) {
  std::vector<int> k(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int used) {
    if (i == n) {
      if (used >= lo) f(k, used);
      return;
    }
    for (int v = 0; used + v <= hi; ++v) {
      k[i] = v;
      rec(i + 1, used + v);
    }
    k[i] = 0;
  };
  rec(0, 0);
}

double spectral_sum(const AlphaParam& alpha, double t, int lo, int hi, const Point& x,
                    const Point& y, bool absolute) {
  const auto tx = laguerre_table(alpha, x, hi);
  const auto ty = laguerre_table(alpha, y, hi);
  double sum = 0.0;
  for_each_multi_index(alpha.n(), lo, hi, [&](const std::vector<int>& k, int total) {
    double term = std::exp(-total * t);
    for (std::size_t i = 0; i < k.size(); ++i) term *= tx[i][static_cast<std::size_t>(k[i])] * ty[i][static_cast<std::size_t>(k[i])];
    sum += absolute ? std::abs(term) : term;
  });
  return sum;
}

double s_integral(const HeatEval& eval, const Point& x, const Point& y) {
  const AlphaParam& alpha = eval.alpha;
  double log_total = 0.0;
  for (std::size_t j = 0; j < alpha.n(); ++j) {
    const double a = alpha[j];
    const Coord c = coord(eval.t, x[j], y[j]);
    const int order = eval.order > 0 ? eval.order : auto_order(c.kappa);
    const QuadratureRule& rule = jacobi_rule(order, a);
    double acc = 0.0;
    for (std::size_t m = 0; m < rule.nodes.size(); ++m)
      acc += rule.weights[m] * std::exp(-c.kappa * (1.0 - rule.nodes[m]));
    log_total += log_pi_alpha_const(a) - (a + 1.0) * std::log(c.d) + c.log_pref + std::log(acc);
  }
  return std::exp(log_total);
}

}  // namespace

double spectral_tail_bound(const AlphaParam& alpha, double t, int k_max, const Point& x,
                           const Point& y) {
  return spectral_sum(alpha, t, k_max + 1, 4 * std::max(k_max, 1), x, y, true);
}

KernelResult heat_kernel(const HeatEval& eval, const Point& x, const Point& y) {
  check_time(eval.t);
  check_point(eval.alpha, x, "heat_kernel");
  check_point(eval.alpha, y, "heat_kernel");
  KernelResult r;
  r.flagged = eval.t < kSmallTime;
  switch (eval.method) {
    case HeatMethod::bessel_product: r.value = std::exp(heat_kernel_log(eval.alpha, eval.t, x, y)); break;
    case HeatMethod::spectral:
      if (eval.k_max < 0) throw DomainError("spectral truncation must be >= 0");
      r.value = spectral_sum(eval.alpha, eval.t, 0, eval.k_max, x, y, false);
      // truncation visible at double precision
      if (std::exp(-(eval.k_max + 1.0) * eval.t) > 1e-8) r.flagged = true;
      break;
    case HeatMethod::s_integral:
      if (eval.order != 0 && eval.order < 4) throw DomainError("s-integral order must be >= 4");
      r.value = s_integral(eval, x, y);
      break;
  }
  if (!std::isfinite(r.value)) r.flagged = true;
  return r;
}

SplitValue heat_kernel_split(const HeatEval& eval, double c0, const Point& x, const Point& y) {
  check_time(eval.t);
  const AlphaParam& alpha = eval.alpha;
  check_point(alpha, x, "heat_kernel_split");
  check_point(alpha, y, "heat_kernel_split");
  SplitValue out;
  out.flagged = eval.t < kSmallTime;
  const std::size_t n = alpha.n();
  const double l = 1.0 + norm2(x) + norm2(y);
  const double l2c = l * l / (c0 * c0);

  if (n == 1) {
    // s = cos(theta) turns (1-s^2)^{a-1/2} ds into sin^{2a}(theta) d(theta)
    const double a = alpha[0];
    const Coord c = coord(eval.t, x[0], y[0]);
    const double log_pref = log_pi_alpha_const(a) - (a + 1.0) * std::log(c.d) + c.log_pref;
    const double xx = x[0] * x[0] + y[0] * y[0], xy2 = 2.0 * x[0] * y[0];
    auto phi_of = [&](double theta) {
      const double one_minus_s = 2.0 * std::pow(std::sin(0.5 * theta), 2);
      const double s = 1.0 - one_minus_s;
      const double d = x[0] - y[0] * s;
      const double qm = d * d + y[0] * y[0] * one_minus_s * (1.0 + s);
      return cutoff_psi(qm * l2c);
    };
    auto body = [&](double theta) {
      const double one_minus_s = 2.0 * std::pow(std::sin(0.5 * theta), 2);
      const double sn = std::sin(theta);
      const double w = a == 0.0 ? 1.0 : std::pow(sn, 2.0 * a);
      return w * std::exp(-c.kappa * one_minus_s);
    };
    std::vector<double> cuts{0.0, std::numbers::pi};
    if (xy2 > 0.0) {
      for (double rho : {1.0, 4.0}) {
        const double s = (xx - rho / l2c) / xy2;
        if (s > -1.0 && s < 1.0) cuts.push_back(std::acos(s));
      }
    }
    if (c.kappa > 1.0) {
      for (double m : {2.0, 8.0, 30.0}) {
        const double th = m / std::sqrt(c.kappa);
        if (th < std::numbers::pi) cuts.push_back(th);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    // the whole s-integral sets the absolute accuracy of both parts, so a
    // part that is negligible next to the kernel is not refined for nothing
    double whole = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) whole += integrate_adaptive(body, cuts[i], cuts[i + 1], 1e-12, 40).value;
    const double abs_tol = 1e-14 * whole;
    double loc = 0.0, glob = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (cuts[i + 1] - cuts[i] <= 0.0) continue;
      auto rl = integrate_adaptive([&](double th) { return body(th) * phi_of(th); }, cuts[i], cuts[i + 1], 1e-12, 40,
                                   abs_tol);
      auto rg = integrate_adaptive([&](double th) { return body(th) * (1.0 - phi_of(th)); }, cuts[i], cuts[i + 1],
                                   1e-12, 40, abs_tol);
      loc += rl.value;
      glob += rg.value;
      if (!rl.converged || !rg.converged) out.flagged = true;
    }
    out.local_part = loc > 0.0 ? std::exp(log_pref + std::log(loc)) : 0.0;
    out.global_part = glob > 0.0 ? std::exp(log_pref + std::log(glob)) : 0.0;
    return out;
  }

  // tensor Gauss-Jacobi
  std::vector<const QuadratureRule*> rules(n);
  std::vector<Coord> cs(n);
  double log_pref = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cs[j] = coord(eval.t, x[j], y[j]);
    const int order = eval.order > 0 ? eval.order : std::min(400, 2 * auto_order(cs[j].kappa));
    rules[j] = &jacobi_rule(order, alpha[j]);
    log_pref += log_pi_alpha_const(alpha[j]) - (alpha[j] + 1.0) * std::log(cs[j].d) + cs[j].log_pref;
  }
  std::vector<std::size_t> idx(n, 0);
  Point s(n);
  double loc = 0.0, glob = 0.0;
  while (true) {
    double w = 1.0, expo = 0.0, qm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double sj = rules[j]->nodes[idx[j]];
      s[j] = sj;
      w *= rules[j]->weights[idx[j]];
      expo -= cs[j].kappa * (1.0 - sj);
      const double d = x[j] - y[j] * sj;
      qm += d * d + y[j] * y[j] * (1.0 - sj) * (1.0 + sj);
    }
    const double phi = cutoff_psi(qm * l2c);
    const double v = w * std::exp(expo);
    loc += v * phi;
    glob += v * (1.0 - phi);
    std::size_t j = 0;
    while (j < n && ++idx[j] == rules[j]->nodes.size()) idx[j++] = 0;
    if (j == n) break;
  }
  out.local_part = loc > 0.0 ? std::exp(log_pref + std::log(loc)) : 0.0;
  out.global_part = glob > 0.0 ? std::exp(log_pref + std::log(glob)) : 0.0;
  return out;
}

std::vector<double> heat_apply(const DiscreteFunction& f, const HeatEval& eval,
                               const std::vector<Point>& xs) {
  if (f.grid.measure != Measure::mu_alpha) throw DomainError("heat_apply needs a mu_alpha grid");
  if (f.grid.dim() != eval.alpha.n()) throw DimensionError("heat_apply: grid dimension mismatch");
  const std::size_t m = f.grid.size();
  std::vector<Point> ys(m);
  std::vector<double> wf(m);
  for (std::size_t k = 0; k < m; ++k) {
    ys[k] = f.grid.point(k);
    wf[k] = f.grid.weight(k) * f.values[k];
  }
  std::vector<double> out(xs.size());
  std::vector<double> terms(m);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t k = 0; k < m; ++k) terms[k] = wf[k] == 0.0 ? 0.0 : wf[k] * heat_kernel(eval, xs[i], ys[k]).value;
    out[i] = pairwise_sum(terms);
  }
  return out;
}

DiscreteFunction heat_apply_on_grid(const DiscreteFunction& f, const HeatEval& eval) {
  std::vector<Point> xs(f.grid.size());
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = f.grid.point(k);
  DiscreteFunction out;
  out.grid = f.grid;
  out.values = heat_apply(f, eval, xs);
  return out;
}

SubordinationRule SubordinationRule::log_panel(int panels, int per_panel) {
  SubordinationRule r;
  r.kind = Kind::log_panel;
  const double lo = -60.0, hi = 4.0;
  const double h = (hi - lo) / panels;
  const QuadratureRule gl = gauss_legendre(per_panel);
  const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
  for (int p = 0; p < panels; ++p) {
    for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
      const double sigma = lo + h * (p + 0.5 * (1.0 + gl.nodes[j]));
      const double v = std::exp(sigma);
      r.v.push_back(v);
      r.weights.push_back(0.5 * h * gl.weights[j] * std::exp(0.5 * sigma - v - log_sqrt_pi));
    }
  }
  return r;
}

SubordinationRule SubordinationRule::laguerre(int order) {
  SubordinationRule r;
  r.kind = Kind::gauss_laguerre;
  const QuadratureRule gl = gauss_laguerre(order, -0.5);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
    r.v.push_back(gl.nodes[j]);
    r.weights.push_back(gl.weights[j] * inv_sqrt_pi);
  }
  return r;
}

double SubordinationRule::apply(double t, const std::function<double(double)>& g) const {
  std::vector<double> terms(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (weights[i] == 0.0) continue;
    terms[i] = weights[i] * g(t * t / (4.0 * v[i]));
  }
  return pairwise_sum(terms);
}

double SubordinationRule::mass(double t) const {
  return apply(t, [](double) { return 1.0; });
}

namespace {

// sum_i w_i c_i exp(log_g(u_i)) with the weights kept out of the exponent
// only when they are representable.
double subordinate_log(const SubordinationRule& rule, double t, int k,
                       const std::function<double(double)>& log_g) {
  std::vector<double> terms(rule.v.size());
  const double sign = (k % 2) ? -1.0 : 1.0;
  for (std::size_t i = 0; i < rule.v.size(); ++i) {
    const double w = rule.weights[i];
    if (w == 0.0) continue;
    const double v = rule.v[i];
    const double u = t * t / (4.0 * v);
    double factor = 1.0;
    if (k > 0) factor = sign * std::pow(t, -k) * 0.5 * std::pow(v, 0.5 * (k - 1)) * hermite_value(k + 1, std::sqrt(v));
    if (factor == 0.0) continue;
    const double lg = log_g(u);
    terms[i] = std::copysign(std::exp(std::log(w) + std::log(std::abs(factor)) + lg), factor);
  }
  return pairwise_sum(terms);
}

}  // namespace

KernelResult poisson_kernel(const AlphaParam& alpha, double t, const Point& x, const Point& y,
                            const SubordinationRule& rule) {
  if (!(t > 0.0)) throw DomainError("poisson kernel requires t > 0");
  check_point(alpha, x, "poisson_kernel");
  check_point(alpha, y, "poisson_kernel");
  KernelResult r;
  r.value = subordinate_log(rule, t, 0, [&](double u) { return heat_kernel_log(alpha, u, x, y); });
  r.flagged = t < kSmallTime || !std::isfinite(r.value);
  return r;
}

double subordinate_dt(int k, double t, const std::function<double(double)>& g,
                      const SubordinationRule& rule) {
  if (k < 1 || k > 8) throw DomainError("t-derivatives of order 1..8 only");
  if (!(t > 0.0)) throw DomainError("subordinate_dt requires t > 0");
  const double sign = (k % 2) ? -1.0 : 1.0;
  std::vector<double> terms(rule.v.size());
  for (std::size_t i = 0; i < rule.v.size(); ++i) {
    const double v = rule.v[i];
    const double u = t * t / (4.0 * v);
    terms[i] = rule.weights[i] * sign * std::pow(t, -k) * 0.5 * std::pow(v, 0.5 * (k - 1)) *
               hermite_value(k + 1, std::sqrt(v)) * g(u);
  }
  return pairwise_sum(terms);
}

double dt_poisson(const AlphaParam& alpha, int k, double t, const Point& x, const Point& y,
                  const SubordinationRule& rule) {
  if (k < 1 || k > 8) throw DomainError("t-derivatives of order 1..8 only");
  if (!(t > 0.0)) throw DomainError("dt_poisson requires t > 0");
  check_point(alpha, x, "dt_poisson");
  check_point(alpha, y, "dt_poisson");
  return subordinate_log(rule, t, k, [&](double u) { return heat_kernel_log(alpha, u, x, y); });
}

DerivativeStructure derivative_structure_check(const KernelContext& ctx, int z_samples) {
  using C = std::complex<double>;
  const double xs = ctx.x_sq(), ys = ctx.y_sq(), b = ctx.b();
  const double hom = ctx.alpha().homogeneity();
  auto log_f = [&](C z) {
    const C w = std::exp(-0.5 * z);
    const C d = 1.0 - w * w;
    return -(w * w * xs + ys - w * b) / d - hom * std::log(d);
  };
  const double h = 1e-30;
  std::vector<double> ws, vals, ratio;
  for (int i = 0; i < z_samples; ++i) {
    // z log-spaced over [1e-3, 30]
    const double z = std::exp(std::log(1e-3) + (std::log(30.0) - std::log(1e-3)) * i / (z_samples - 1));
    const double dlog = std::imag(log_f(C(z, h))) / h;
    const double w = std::exp(-0.5 * z);
    const double d = -std::expm1(-z);
    ws.push_back(w);
    ratio.push_back(dlog);
    vals.push_back(dlog * d * d);
  }
  Eigen::MatrixXd v(z_samples, 5);
  Eigen::VectorXd rhs(z_samples);
  for (int i = 0; i < z_samples; ++i) {
    double p = 1.0;
    for (int j = 0; j < 5; ++j) {
      v(i, j) = p;
      p *= ws[static_cast<std::size_t>(i)];
    }
    rhs(i) = vals[static_cast<std::size_t>(i)];
  }
  const Eigen::VectorXd coef = v.colPivHouseholderQr().solve(rhs);
  const Eigen::VectorXd resid = v * coef - rhs;
  DerivativeStructure out;
  out.fit_residual = resid.cwiseAbs().maxCoeff() / std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
  out.coeffs.assign(coef.data(), coef.data() + coef.size());
  int last = 0;
  for (double r : ratio) {
    const int sgn = r > 0.0 ? 1 : (r < 0.0 ? -1 : 0);
    if (sgn != 0 && last != 0 && sgn != last) ++out.sign_changes;
    if (sgn != 0) last = sgn;
  }
  return out;
}

}  // namespace lagvar
