#include "lagvar/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lagvar/errors.hpp"
#include "lagvar/quadrature.hpp"

namespace lagvar {

namespace {

constexpr double kGolden = 0.6180339887498949;

// max of f on [lo, hi] by golden-section search, assuming one local peak
template <class F>
double golden_max(F&& f, double lo, double hi, int iters = 60) {
  double a = lo, b = hi;
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  double best = std::max(fc, fd);
  for (int i = 0; i < iters && b - a > 1e-14 * std::max(1.0, std::abs(b)); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
      best = std::max(best, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
      best = std::max(best, fd);
    }
  }
  return best;
}

// max over a grid of f, then polished between the neighbours of the argmax
template <class F>
double grid_max_polished(F&& f, const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("empty t grid");
  std::size_t arg = 0;
  double best = -INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) throw DomainError("t grid must be finite and positive");
    const double v = f(grid[i]);
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  const double lo = grid[arg == 0 ? 0 : arg - 1];
  const double hi = grid[std::min(arg + 1, grid.size() - 1)];
  if (hi > lo) best = std::max(best, golden_max(f, lo, hi));
  return best;
}

double log_pi_alpha_const(double a) {
  return log_gamma(a + 1.0) - log_gamma(a + 0.5) - 0.5 * std::log(std::numbers::pi);
}

int auto_order(double kappa, int extra) {
  const int o = static_cast<int>(std::ceil(24.0 + 6.0 * std::sqrt(std::max(kappa, 0.0)))) + extra;
  return std::min(400, (o + 7) / 8 * 8);
}

}  // namespace

// ---------------------------------------------------------------- expansions

int index_hat(const MultiIndex& k) {
  int s = 0;
  for (int v : k) s += v;
  return s;
}

std::vector<std::vector<double>> axis_tables(const AlphaParam& alpha, int degree, const MultiIndex& beta,
                                             const Point& x) {
  if (x.size() != alpha.n() || beta.size() != alpha.n()) throw DimensionError("axis_tables: dimension mismatch");
  std::vector<std::vector<double>> tab(alpha.n());
  for (std::size_t i = 0; i < alpha.n(); ++i) tab[i] = laguerre_dx_table(degree, alpha[i], beta[i], x[i]);
  return tab;
}

double tensor_from(const std::vector<std::vector<double>>& tab, const MultiIndex& k) {
  double p = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) p *= tab[i][static_cast<std::size_t>(k[i])];
  return p;
}

std::vector<MultiIndex> Expansion::indices_up_to(std::size_t n, int degree) {
  std::vector<MultiIndex> out;
  MultiIndex k(n, 0);
  for (int total = 0; total <= degree; ++total) {
    // all compositions of total into n nonnegative parts, lexicographic
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i + 1 == n) {
        k[i] = left;
        out.push_back(k);
        return;
      }
      for (int v = left; v >= 0; --v) {
        k[i] = v;
        rec(i + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

Expansion Expansion::single(const AlphaParam& alpha, const MultiIndex& k, double c) {
  if (k.size() != alpha.n()) throw DimensionError("multi-index dimension mismatch");
  Expansion e;
  e.alpha = alpha;
  e.indices = {k};
  e.coeffs = {c};
  return e;
}

Expansion Expansion::project(const DiscreteFunction& f, const AlphaParam& alpha, int degree) {
  if (f.grid.measure != Measure::mu_alpha) throw DomainError("projection needs a mu_alpha grid");
  if (f.grid.dim() != alpha.n()) throw DimensionError("projection: grid dimension mismatch");
  Expansion e;
  e.alpha = alpha;
  e.indices = indices_up_to(alpha.n(), degree);
  const std::size_t m = f.grid.size();
  std::vector<std::vector<double>> terms(e.indices.size(), std::vector<double>(m, 0.0));
  const MultiIndex zero(alpha.n(), 0);
  for (std::size_t j = 0; j < m; ++j) {
    const double wf = f.grid.weight(j) * f.values[j];
    if (wf == 0.0) continue;
    const auto tab = axis_tables(alpha, degree, zero, f.grid.point(j));
    for (std::size_t i = 0; i < e.indices.size(); ++i) terms[i][j] = wf * tensor_from(tab, e.indices[i]);
  }
  for (const auto& row : terms) e.coeffs.push_back(pairwise_sum(row));
  return e;
}

int Expansion::max_degree() const {
  int d = 0;
  for (const auto& k : indices)
    for (int v : k) d = std::max(d, v);
  return d;
}

double Expansion::operator()(const Point& x) const { return heat(0.0, x); }

double Expansion::heat(double t, const Point& x) const {
  const auto tab = axis_tables(alpha, max_degree(), MultiIndex(alpha.n(), 0), x);
  double s = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (coeffs[i] != 0.0) s += coeffs[i] * std::exp(-t * index_hat(indices[i])) * tensor_from(tab, indices[i]);
  return s;
}

double Expansion::poisson(double t, const Point& x) const {
  const auto tab = axis_tables(alpha, max_degree(), MultiIndex(alpha.n(), 0), x);
  double s = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (coeffs[i] != 0.0)
      s += coeffs[i] * std::exp(-t * std::sqrt(static_cast<double>(index_hat(indices[i])))) * tensor_from(tab, indices[i]);
  return s;
}

double Expansion::l2_norm() const {
  double s = 0.0;
  for (double c : coeffs) s += c * c;
  return std::sqrt(s);
}

DiscreteFunction Expansion::sample(const TensorGrid& grid) const {
  return DiscreteFunction::sample(grid, [&](const Point& x) { return (*this)(x); });
}

// ------------------------------------------------------------- v(t) analysis

std::string to_string(VtBranch b) { return b == VtBranch::b_nonpositive ? "b_nonpositive" : "b_positive"; }

namespace {

double vt_log(const KernelContext& ctx, double t) {
  const double u = ctx.a() / t - ctx.b() * std::sqrt(1.0 - t) / t - ctx.x_sq();
  return -u - ctx.alpha().homogeneity() * std::log(t);
}

double vt_grid_sup(const KernelContext& ctx, int points) {
  const double lo = std::log(1e-6), hi = std::log1p(-1e-6);
  double best = -INFINITY;
  for (int i = 0; i < points; ++i) {
    const double t = std::exp(lo + (hi - lo) * i / (points - 1));
    best = std::max(best, vt_log(ctx, t));
  }
  return std::exp(best);
}

}  // namespace

double vt_value(const KernelContext& ctx, double t) {
  if (!(t > 0.0) || t > 1.0) throw DomainError("v(t) is defined for t in (0,1]");
  return std::exp(vt_log(ctx, t));
}

VtAnalysis vt_analyze(const KernelContext& ctx, double c0, int grid_points) {
  if (region_classify(ctx, RegionParams{1.0, c0}) == Region::local)
    throw ConstructionError("vt_analyze needs a global (x,y,s)");
  if (grid_points < 2) throw DomainError("vt grid needs at least two points");
  VtAnalysis r;
  r.a = ctx.a();
  r.b = ctx.b();
  r.grid_sup = vt_grid_sup(ctx, grid_points);
  if (r.b <= 0.0) {
    r.branch = VtBranch::b_nonpositive;
    r.t0 = 1.0;
    r.u0 = ctx.y_sq();
    r.sup_value = std::exp(-ctx.y_sq());
    return r;
  }
  r.branch = VtBranch::b_positive;
  const double c = std::sqrt(ctx.q_plus() * ctx.q_minus());
  r.t0 = 2.0 * c / (r.a + c);
  r.u0 = 0.5 * (ctx.y_sq() - ctx.x_sq() + c);
  r.sup_value = std::exp(-r.u0 - ctx.alpha().homogeneity() * std::log(r.t0));
  return r;
}

double h_kernel(double epsilon, const KernelContext& ctx) {
  if (!(epsilon >= 0.0) || !(epsilon < 1.0)) throw DomainError("epsilon must lie in [0,1)");
  if (ctx.xys() <= 0.0) return std::exp(-(1.0 - epsilon) * ctx.y_sq());
  const double c = std::sqrt(ctx.q_plus() * ctx.q_minus());
  return std::exp(ctx.alpha().homogeneity() * std::log(ctx.q_plus()) -
                  0.5 * (1.0 - epsilon) * (ctx.y_sq() - ctx.x_sq() + c));
}

MaximalBoundReport global_maximal_bound_check(const AlphaParam& alpha,
                                              const std::vector<KernelContext>& samples,
                                              double c0, int grid_points) {
  MaximalBoundReport rep;
  for (const auto& ctx : samples) {
    if (ctx.alpha().values() != alpha.values()) throw DomainError("sample alpha mismatch");
    if (region_classify(ctx, RegionParams{1.0, c0}) == Region::local) {
      ++rep.rejected;
      continue;
    }
    ++rep.samples;
    const VtAnalysis coarse = vt_analyze(ctx, c0, grid_points);
    const double fine = vt_grid_sup(ctx, 2 * grid_points);
    const double h = h_kernel(0.0, ctx);
    rep.constant = std::max(rep.constant, coarse.grid_sup / h);
    rep.constant_fine = std::max(rep.constant_fine, fine / h);
    if (coarse.branch == VtBranch::b_nonpositive) {
      rep.b_nonpositive_excess = std::max(rep.b_nonpositive_excess, fine * std::exp(ctx.y_sq()) - 1.0);
    } else {
      const double v0 = coarse.sup_value;
      rep.comparability = std::max({rep.comparability, coarse.grid_sup / v0, v0 / coarse.grid_sup});
      rep.comparability_fine = std::max({rep.comparability_fine, fine / v0, v0 / fine});
    }
  }
  rep.refinement_ratio = rep.constant > 0.0 ? rep.constant_fine / rep.constant : 1.0;
  const double comp_ratio = rep.comparability > 0.0 ? rep.comparability_fine / rep.comparability : 1.0;
  rep.pass = std::isfinite(rep.constant_fine) && std::abs(rep.refinement_ratio - 1.0) <= 0.15 &&
             std::abs(comp_ratio - 1.0) <= 0.15 && rep.comparability_fine <= 100.0 &&
             rep.b_nonpositive_excess <= 1e-6;
  return rep;
}

// ----------------------------------------------------------------- maximal

std::vector<double> log_time_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) throw DomainError("bad log time grid");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
  return g;
}

namespace {

double constant_coeff(const Expansion& f) {
  for (std::size_t i = 0; i < f.indices.size(); ++i)
    if (index_hat(f.indices[i]) == 0) return f.coeffs[i];
  return 0.0;
}

}  // namespace

double maximal_heat(const Expansion& f, const Point& x, const std::vector<double>& t_grid) {
  const double edge = std::max(std::abs(f(x)), std::abs(constant_coeff(f)));
  return std::max(edge, grid_max_polished([&](double t) { return std::abs(f.heat(t, x)); }, t_grid));
}

double maximal_poisson(const Expansion& f, const Point& x, const std::vector<double>& t_grid) {
  const double edge = std::max(std::abs(f(x)), std::abs(constant_coeff(f)));
  return std::max(edge, grid_max_polished([&](double t) { return std::abs(f.poisson(t, x)); }, t_grid));
}

DiscreteFunction maximal_heat_on_grid(const DiscreteFunction& f, const AlphaParam& alpha,
                                      const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw DomainError("empty t grid");
  DiscreteFunction out;
  out.grid = f.grid;
  out.values.assign(f.grid.size(), 0.0);
  for (double t : t_grid) {
    if (!(t > 0.0)) throw DomainError("t grid must be positive");
    const auto w = heat_apply_on_grid(f, HeatEval{alpha, t});
    for (std::size_t i = 0; i < w.values.size(); ++i) out.values[i] = std::max(out.values[i], std::abs(w.values[i]));
  }
  return out;
}

// ---------------------------------------------------------------- H operator

double a_epsilon(double epsilon, double p_infty) {
  const double h = 0.5 * (1.0 - epsilon);
  return h - std::abs(1.0 / p_infty - h);
}

double default_epsilon(double p_minus, const AlphaParam& alpha) {
  if (!(p_minus > 1.0)) throw DomainError("p- must exceed 1");
  return 0.5 * std::min((p_minus - 1.0) / p_minus, 1.0 / alpha.homogeneity());
}

double h_kernel_integrated(const AlphaParam& alpha, double epsilon, double c0, const Point& x,
                           const Point& y, int order) {
  const std::size_t n = alpha.n();
  if (x.size() != n || y.size() != n) throw DimensionError("h_kernel_integrated: dimension mismatch");
  if (n == 1) {
    // s = cos(theta); the branch switch sits at theta = pi/2
    const double a = alpha[0];
    const double logc = log_pi_alpha_const(a);
    const double l = 1.0 + std::abs(x[0]) + std::abs(y[0]);
    if (!(epsilon >= 0.0) || !(epsilon < 1.0)) throw DomainError("epsilon must lie in [0,1)");
    // scalar form of h_kernel and region_ratio, this is the hot loop of h_apply
    const double x2 = x[0] * x[0], y2 = y[0] * y[0], xy = x[0] * y[0];
    const double hom = alpha.homogeneity(), l2c = l * l / (c0 * c0);
    auto body = [&](double th) {
      const double s = std::cos(th);
      const double qp = x2 + y2 + 2.0 * xy * s, qm = x2 + y2 - 2.0 * xy * s;
      const double phi = cutoff_psi(qm * l2c);
      if (phi >= 1.0) return 0.0;
      const double w = a == 0.0 ? 1.0 : std::pow(std::sin(th), 2.0 * a);
      const double h = xy * s <= 0.0
                           ? std::exp(-(1.0 - epsilon) * y2)
                           : std::exp(hom * std::log(qp) - 0.5 * (1.0 - epsilon) * (y2 - x2 + std::sqrt(qp * qm)));
      return w * h * (1.0 - phi);
    };
    std::vector<double> cuts{0.0, 0.5 * std::numbers::pi, std::numbers::pi};
    const double xx = x[0] * x[0] + y[0] * y[0], xy2 = 2.0 * x[0] * y[0];
    if (xy2 > 0.0)
      for (double rho : {1.0, 4.0}) {
        const double s = (xx - rho * c0 * c0 / (l * l)) / xy2;
        if (s > -1.0 && s < 1.0) cuts.push_back(std::acos(s));
      }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) total += integrate_adaptive(body, cuts[i], cuts[i + 1], 1e-10, 30).value;
    return std::exp(logc) * total;
  }
  std::vector<const QuadratureRule*> rules(n);
  double logc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    rules[j] = &cached_gauss_jacobi(order, alpha[j] - 0.5, alpha[j] - 0.5);
    logc += log_pi_alpha_const(alpha[j]);
  }
  std::vector<std::size_t> idx(n, 0);
  Point s(n);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = rules[j]->nodes[idx[j]];
      w *= rules[j]->weights[idx[j]];
    }
    KernelContext ctx(alpha, x, y, s);
    const double phi = cutoff_psi(region_ratio(ctx, c0));
    if (phi < 1.0) total += w * h_kernel(epsilon, ctx) * (1.0 - phi);
    std::size_t j = 0;
    while (j < n && ++idx[j] == rules[j]->nodes.size()) idx[j++] = 0;
    if (j == n) break;
  }
  return std::exp(logc) * total;
}

HApplyResult h_apply(const DiscreteFunction& f, const AlphaParam& alpha, double epsilon,
                     double c0, const TensorGrid& out_grid, double p_minus) {
  if (f.grid.measure != Measure::m_alpha) throw DomainError("h_apply integrates against m_alpha");
  if (f.grid.dim() != alpha.n() || out_grid.dim() != alpha.n())
    throw DimensionError("h_apply: grid dimension mismatch");
  HApplyResult r;
  r.epsilon_admissible = epsilon > 0.0 && epsilon < std::min((p_minus - 1.0) / p_minus, 1.0 / alpha.homogeneity());
  r.value.grid = out_grid;
  r.value.values.assign(out_grid.size(), 0.0);
  if (f.is_zero()) return r;
  const std::size_t m = f.grid.size();
  std::vector<double> terms(m);
  for (std::size_t i = 0; i < out_grid.size(); ++i) {
    const Point x = out_grid.point(i);
    for (std::size_t k = 0; k < m; ++k) {
      const double wf = f.grid.weight(k) * f.values[k];
      terms[k] = wf == 0.0 ? 0.0 : wf * h_kernel_integrated(alpha, epsilon, c0, x, f.grid.point(k));
    }
    r.value.values[i] = pairwise_sum(terms);
  }
  return r;
}

// ------------------------------------------------------------------- Riesz

double riesz_spectral(const Expansion& f, const MultiIndex& beta, const Point& x) {
  if (beta.size() != f.alpha.n()) throw DimensionError("beta dimension mismatch");
  const int bh = index_hat(beta);
  if (bh == 0) throw DomainError("Riesz order must be nonzero");
  const auto tab = axis_tables(f.alpha, f.max_degree(), beta, x);
  double s = 0.0;
  for (std::size_t i = 0; i < f.indices.size(); ++i) {
    const int kh = index_hat(f.indices[i]);
    if (kh == 0 || f.coeffs[i] == 0.0) continue;
    s += f.coeffs[i] * std::pow(static_cast<double>(kh), -0.5 * bh) * tensor_from(tab, f.indices[i]);
  }
  return s;
}

DiscreteFunction riesz_spectral_on_grid(const Expansion& f, const MultiIndex& beta,
                                        const TensorGrid& grid) {
  return DiscreteFunction::sample(grid, [&](const Point& x) { return riesz_spectral(f, beta, x); });
}

double heat_kernel_dx(const AlphaParam& alpha, const MultiIndex& beta, double t, const Point& x,
                      const Point& y) {
  if (!(t > 0.0)) throw DomainError("heat_kernel_dx requires t > 0");
  const std::size_t n = alpha.n();
  if (x.size() != n || y.size() != n || beta.size() != n) throw DimensionError("heat_kernel_dx: dimension mismatch");
  const double eh = std::exp(-0.5 * t);
  const double d = -std::expm1(-t);
  const double sd = std::sqrt(d);
  double log_mag = 0.0, sign = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = alpha[j];
    const double kappa = 2.0 * eh * x[j] * y[j] / d;
    const double diff = x[j] - y[j];
    const double log_pref = -eh * eh * diff * diff / d + 2.0 * eh * x[j] * y[j] / (1.0 + eh);
    double lm = log_pi_alpha_const(a) - (a + 1.0) * std::log(d) + log_pref;
    const int m = beta[j];
    const QuadratureRule& rule = cached_gauss_jacobi(auto_order(kappa, m), a - 0.5, a - 0.5);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = rule.nodes[i];
      const double w = (eh * x[j] - y[j] * s) / sd;
      acc += rule.weights[i] * hermite_value(m, w) * std::exp(-kappa * (1.0 - s));
    }
    if (acc == 0.0) return 0.0;
    if (acc < 0.0) sign = -sign;
    // (-sqrt(E/D))^m from the chain rule
    if (m % 2) sign = -sign;
    lm += std::log(std::abs(acc)) + 0.5 * m * (std::log(eh * eh) - std::log(d));
    log_mag += lm;
  }
  return sign * std::exp(log_mag);
}

RieszKernelValue riesz_kernel(const AlphaParam& alpha, const MultiIndex& beta, const Point& x,
                              const Point& y) {
  const int bh = index_hat(beta);
  if (bh == 0) throw DomainError("Riesz order must be nonzero");
  if (x.size() != alpha.n() || y.size() != alpha.n() || beta.size() != alpha.n())
    throw DimensionError("riesz_kernel: dimension mismatch");
  const double d2 = distance(x, y) * distance(x, y);
  if (d2 == 0.0) throw DomainError("Riesz kernel is evaluated off the diagonal only");
  auto body = [&](double t) {
    if (t <= 0.0) return 0.0;
    return std::pow(t, 0.5 * bh - 1.0) * heat_kernel_dx(alpha, beta, t, x, y);
  };
  std::vector<double> cuts{0.0, d2 / 16.0, d2 / 4.0, d2, 4.0 * d2, 1.0, 5.0, 20.0};
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  RieszKernelValue r;
  double total = 0.0;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    const double hi = i + 1 < cuts.size() ? cuts[i + 1] : INFINITY;
    const auto part = integrate_adaptive(body, cuts[i], hi, 1e-10, 40);
    total += part.value;
    if (!part.converged) r.flagged = true;
  }
  r.value = total / std::tgamma(0.5 * bh);
  if (!std::isfinite(r.value)) r.flagged = true;
  return r;
}

// ------------------------------------------------------------ g-functions

double g_function(const Expansion& f, const MultiIndex& beta, int k, const Point& x, int order) {
  if (beta.size() != f.alpha.n()) throw DimensionError("beta dimension mismatch");
  if (k < 0) throw DomainError("k must be nonnegative");
  const int m = k + index_hat(beta);
  if (m <= 0) throw DomainError("k + |beta| must be positive");
  std::vector<double> amp, rate;
  const auto tab = axis_tables(f.alpha, f.max_degree(), beta, x);
  for (std::size_t i = 0; i < f.indices.size(); ++i) {
    if (f.coeffs[i] == 0.0) continue;
    const double mu = std::sqrt(static_cast<double>(index_hat(f.indices[i])));
    const double a = f.coeffs[i] * std::pow(-mu, k) * tensor_from(tab, f.indices[i]);
    if (a == 0.0 || mu == 0.0) continue;
    amp.push_back(a);
    rate.push_back(mu);
  }
  if (amp.empty()) return 0.0;
  // int_0^inf (sum a_j e^{-mu_j t})^2 t^{2m-1} dt with tau = 2 mu_min t
  const double mu_min = *std::min_element(rate.begin(), rate.end());
  const QuadratureRule rule = gauss_laguerre(order, 2.0 * m - 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i] / (2.0 * mu_min);
    double inner = 0.0;
    for (std::size_t j = 0; j < amp.size(); ++j) inner += amp[j] * std::exp(-(rate[j] - mu_min) * t);
    sum += rule.weights[i] * inner * inner;
  }
  return std::sqrt(sum * std::pow(2.0 * mu_min, -2.0 * m));
}

// --------------------------------------------------------------- multipliers

MultiplierSpec MultiplierSpec::imaginary_power(double beta) {
  MultiplierSpec s;
  s.tag = Tag::imaginary_power;
  s.beta = beta;
  // phi(y) = y^{-i beta} / Gamma(1 - i beta) gives m(lambda) = lambda^{i beta}
  const std::complex<double> inv_gamma = std::exp(-log_gamma(std::complex<double>(1.0, -beta)));
  s.phi = [beta, inv_gamma](double y) {
    return inv_gamma * std::exp(std::complex<double>(0.0, -beta * std::log(y)));
  };
  s.phi_sup = std::abs(inv_gamma);
  return s;
}

MultiplierSpec MultiplierSpec::custom(std::function<std::complex<double>(double)> phi, double sup) {
  MultiplierSpec s;
  s.tag = Tag::custom;
  s.phi = std::move(phi);
  s.phi_sup = sup;
  return s;
}

std::complex<double> MultiplierSpec::m(double lambda) const {
  if (lambda < 0.0) throw DomainError("multiplier argument must be nonnegative");
  if (lambda == 0.0) return 0.0;
  if (tag == Tag::imaginary_power) return std::exp(std::complex<double>(0.0, beta * std::log(lambda)));
  // lambda int phi(y) e^{-lambda y} dy = int phi(u/lambda) e^{-u} du
  const auto re = integrate_adaptive([&](double u) { return u == 0.0 ? 0.0 : std::real(phi(u / lambda)) * std::exp(-u); }, 0.0, INFINITY, 1e-12, 40);
  const auto im = integrate_adaptive([&](double u) { return u == 0.0 ? 0.0 : std::imag(phi(u / lambda)) * std::exp(-u); }, 0.0, INFINITY, 1e-12, 40);
  return {re.value, im.value};
}

std::complex<double> ComplexExpansion::operator()(const Point& x) const {
  int deg = 0;
  for (const auto& k : indices)
    for (int v : k) deg = std::max(deg, v);
  const auto tab = axis_tables(alpha, deg, MultiIndex(alpha.n(), 0), x);
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (coeffs[i] != 0.0) s += coeffs[i] * tensor_from(tab, indices[i]);
  return s;
}

double ComplexExpansion::l2_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs) s += std::norm(c);
  return std::sqrt(s);
}

DiscreteFunction ComplexExpansion::modulus(const TensorGrid& grid) const {
  return DiscreteFunction::sample(grid, [&](const Point& x) { return std::abs((*this)(x)); });
}

ComplexExpansion multiplier_apply(const Expansion& f, const MultiplierSpec& spec) {
  ComplexExpansion out;
  out.alpha = f.alpha;
  out.indices = f.indices;
  out.coeffs.resize(f.coeffs.size());
  for (std::size_t i = 0; i < f.coeffs.size(); ++i)
    out.coeffs[i] = f.coeffs[i] == 0.0 ? 0.0 : spec.m(static_cast<double>(index_hat(f.indices[i]))) * f.coeffs[i];
  return out;
}

MultiplierKernelValue multiplier_kernel(const AlphaParam& alpha, const MultiplierSpec& spec,
                                        const Point& x, const Point& y) {
  if (x.size() != alpha.n() || y.size() != alpha.n()) throw DimensionError("multiplier_kernel: dimension mismatch");
  const double d2 = distance(x, y) * distance(x, y);
  if (d2 == 0.0) throw DomainError("multiplier kernel is evaluated off the diagonal only");
  std::vector<double> cuts{0.0, d2 / 16.0, d2 / 4.0, d2, 4.0 * d2, 1.0, 5.0, 20.0};
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  MultiplierKernelValue r;
  std::complex<double> total = 0.0;
  for (int part = 0; part < 2; ++part) {
    auto body = [&](double t) {
      if (t <= 0.0) return 0.0;
      const double dw = -heat_kernel_dt(alpha, t, x, y);
      if (dw == 0.0) return 0.0;
      const auto p = spec.phi(t);
      return (part == 0 ? p.real() : p.imag()) * dw;
    };
    double acc = 0.0;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      const double hi = i + 1 < cuts.size() ? cuts[i + 1] : INFINITY;
      const auto res = integrate_adaptive(body, cuts[i], hi, 1e-10, 40);
      acc += res.value;
      if (!res.converged) r.flagged = true;
    }
    total += part == 0 ? std::complex<double>(acc, 0.0) : std::complex<double>(0.0, acc);
  }
  r.value = total;
  return r;
}

// ---------------------------------------------------------- local heat sup

double local_heat_sup_kernel(const AlphaParam& alpha, double c0, const Point& x, const Point& y,
                             int grid_points) {
  if (grid_points < 2) throw DomainError("need at least two t points");
  double log_norm = static_cast<double>(alpha.n()) * std::log(2.0) - norm2(y) * norm2(y);
  for (std::size_t j = 0; j < alpha.n(); ++j) log_norm -= alpha.log_normalizer(j);
  const double scale = std::exp(log_norm);
  // parametrized by log u, u = 1 - e^{-t}
  auto w_loc = [&](double log_u) {
    const double t = -std::log1p(-std::exp(log_u));
    HeatEval e{alpha, t, HeatMethod::s_integral};
    return heat_kernel_split(e, c0, x, y).local_part;
  };
  const double lo = std::log(1e-6), hi = std::log1p(-1e-6);
  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (grid_points - 1);
  // shift to positive abscissae for the shared helper
  const double shift = 1.0 - lo;
  std::vector<double> shifted(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) shifted[i] = grid[i] + shift;
  const double sup = grid_max_polished([&](double v) { return w_loc(v - shift); }, shifted);
  return sup * scale;
}

}  // namespace lagvar
