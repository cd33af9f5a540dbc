#include "lagvar/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>
#include <tuple>
#include <algorithm>

#include "lagvar/errors.hpp"
#include "lagvar/specfun.hpp"

namespace lagvar {

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::gauss_legendre: return "gauss-legendre";
    case RuleKind::gauss_laguerre: return "gauss-laguerre";
    case RuleKind::gauss_jacobi: return "gauss-jacobi";
    case RuleKind::tanh_sinh: return "tanh-sinh";
  }
  return "unknown";
}

namespace {

// Monic three-term recurrence p_{k+1} = (x - diag_k) p_k - beta_k p_{k-1}.
struct Recurrence {
  std::vector<double> diag;  // k = 0..N
  std::vector<double> beta;  // k = 0..N, beta[0] unused
  double mass = 1.0;
};

Recurrence laguerre_recurrence(int n, double a) {
  Recurrence r;
  r.mass = std::exp(log_gamma(a + 1.0));
  for (int k = 0; k <= n; ++k) {
    r.diag.push_back(2.0 * k + a + 1.0);
    r.beta.push_back(k == 0 ? 0.0 : k * (k + a));
  }
  return r;
}

Recurrence jacobi_recurrence(int n, double a, double b) {
  Recurrence r;
  r.mass = std::exp((a + b + 1.0) * std::log(2.0) + log_gamma(a + 1.0) + log_gamma(b + 1.0) -
                    log_gamma(a + b + 2.0));
  const double ab = a + b;
  for (int k = 0; k <= n; ++k) {
    if (k == 0) {
      r.diag.push_back((b - a) / (ab + 2.0));
      r.beta.push_back(0.0);
      continue;
    }
    const double s = 2.0 * k + ab;
    r.diag.push_back((b * b - a * a) / (s * (s + 2.0)));
    if (k == 1) {
      // cancelled form, valid also when a + b = -1
      r.beta.push_back(4.0 * (1.0 + a) * (1.0 + b) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0)));
    } else {
      r.beta.push_back(4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0)));
    }
  }
  return r;
}

// Orthonormal polynomial values at x: returns log of sum_{k<N} P_k^2, plus
// P_N and P_N' up to a common positive scale.
struct OrthoEval {
  double log_sum = 0.0;
  double pn = 0.0;
  double dpn = 0.0;
};

OrthoEval ortho_eval(const Recurrence& r, int n, double x) {
  double prev = 0.0, dprev = 0.0;
  double cur = 1.0 / std::sqrt(r.mass), dcur = 0.0;
  double log_scale = 0.0;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += cur * cur;
    const double sb_next = std::sqrt(r.beta[static_cast<std::size_t>(k) + 1]);
    const double sb = k == 0 ? 0.0 : std::sqrt(r.beta[static_cast<std::size_t>(k)]);
    const double d = x - r.diag[static_cast<std::size_t>(k)];
    const double next = (d * cur - sb * prev) / sb_next;
    const double dnext = (cur + d * dcur - sb * dprev) / sb_next;
    prev = cur;
    dprev = dcur;
    cur = next;
    dcur = dnext;
    const double mag = std::max(std::abs(cur), std::abs(prev));
    if (mag > 1e150) {
      prev /= mag;
      cur /= mag;
      dprev /= mag;
      dcur /= mag;
      sum /= mag * mag;
      log_scale += std::log(mag);
    }
  }
  return {std::log(sum) + 2.0 * log_scale, cur, dcur};
}

QuadratureRule golub_welsch(const Recurrence& r, int n, RuleKind kind, double a, double b,
                            double lo, double hi) {
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = r.diag[static_cast<std::size_t>(k)];
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(r.beta[static_cast<std::size_t>(k)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConstructionError("tridiagonal eigen-solve failed");

  QuadratureRule rule;
  rule.kind = kind;
  rule.a = a;
  rule.b = b;
  for (int i = 0; i < n; ++i) {
    double x = solver.eigenvalues()(i);
    for (int it = 0; it < 3; ++it) {
      const OrthoEval e = ortho_eval(r, n, x);
      if (e.dpn == 0.0) break;
      const double step = e.pn / e.dpn;
      if (!std::isfinite(step) || std::abs(step) > 1e-6 * (1.0 + std::abs(x))) break;
      x -= step;
      if (std::abs(step) <= 1e-16 * (1.0 + std::abs(x))) break;
    }
    const double w = std::exp(-ortho_eval(r, n, x).log_sum);
    if (!(x > lo && x < hi) || !(w > 0.0) || !std::isfinite(w))
      throw ConstructionError(to_string(kind) + " rule of order " + std::to_string(n) +
                              " produced an invalid node or weight");
    rule.nodes.push_back(x);
    rule.weights.push_back(w);
  }
  return rule;
}

void check_order(int order) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
}

}  // namespace

namespace {

// Mirror a rule whose weight is even so odd moments vanish exactly.
void symmetrize(QuadratureRule& rule) {
  const std::size_t n = rule.nodes.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double x = 0.5 * (rule.nodes[n - 1 - i] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
}

}  // namespace

QuadratureRule gauss_legendre(int order) {
  check_order(order);
  QuadratureRule rule = golub_welsch(jacobi_recurrence(order, 0.0, 0.0), order,
                                     RuleKind::gauss_legendre, 0.0, 0.0, -1.0, 1.0);
  symmetrize(rule);
  return rule;
}

QuadratureRule gauss_laguerre(int order, double a) {
  check_order(order);
  if (!(a > -1.0)) throw DomainError("gauss-laguerre parameter must exceed -1");
  return golub_welsch(laguerre_recurrence(order, a), order, RuleKind::gauss_laguerre, a, 0.0, 0.0,
                      INFINITY);
}

QuadratureRule gauss_jacobi(int order, double a, double b) {
  check_order(order);
  if (!(a > -1.0) || !(b > -1.0)) throw DomainError("gauss-jacobi parameters must exceed -1");
  QuadratureRule rule =
      golub_welsch(jacobi_recurrence(order, a, b), order, RuleKind::gauss_jacobi, a, b, -1.0, 1.0);
  if (a == b) symmetrize(rule);
  return rule;
}

const QuadratureRule& cached_gauss_jacobi(int order, double a, double b) {
  static std::mutex mu;
  static std::map<std::tuple<int, double, double>, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{order, a, b}];
  if (!slot) slot = std::make_unique<QuadratureRule>(gauss_jacobi(order, a, b));
  return *slot;
}

QuadratureRule tanh_sinh(int order) {
  check_order(order);
  QuadratureRule rule;
  rule.kind = RuleKind::tanh_sinh;
  if (order < 3) {
    rule.nodes = {0.0};
    rule.weights = {2.0};
    return rule;
  }
  const int m = (order - 1) / 2;
  const double h = 3.0 / m;
  const double half_pi = 0.5 * std::numbers::pi;
  for (int j = -m; j <= m; ++j) {
    const double t = j * h;
    const double u = half_pi * std::sinh(t);
    const double c = std::cosh(u);
    rule.nodes.push_back(std::tanh(u));
    rule.weights.push_back(h * half_pi * std::cosh(t) / (c * c));
  }
  return rule;
}

QuadratureRule legendre_on(int order, double lo, double hi) {
  QuadratureRule rule = gauss_legendre(order);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

QuadratureRule make_rule(RuleKind kind, int order, double a, double b) {
  switch (kind) {
    case RuleKind::gauss_legendre: return gauss_legendre(order);
    case RuleKind::gauss_laguerre: return gauss_laguerre(order, a);
    case RuleKind::gauss_jacobi: return gauss_jacobi(order, a, b);
    case RuleKind::tanh_sinh: return tanh_sinh(order);
  }
  throw DomainError("unknown rule kind");
}

double weight_mass(RuleKind kind, double a, double b) {
  switch (kind) {
    case RuleKind::gauss_legendre:
    case RuleKind::tanh_sinh: return 2.0;
    case RuleKind::gauss_laguerre: return std::exp(log_gamma(a + 1.0));
    case RuleKind::gauss_jacobi: return jacobi_recurrence(0, a, b).mass;
  }
  return 0.0;
}

namespace {

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One 7/15 point Gauss-Kronrod panel; abscissae and weights from Boost.
template <class F>
Panel gk15_panel(F& f, double lo, double hi) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const double f0 = f(mid);
  double kron = wk[0] * f0;
  double gauss = wg[0] * f0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double fp = f(mid + half * xk[i]);
    const double fm = f(mid - half * xk[i]);
    kron += wk[i] * (fp + fm);
    // Gauss nodes sit at even Kronrod positions
    if (i % 2 == 0) gauss += wg[i / 2] * (fp + fm);
  }
  return {lo, hi, kron * half, std::abs((kron - gauss) * half)};
}

}  // namespace

IntegrationResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                     double rel_tol, unsigned max_depth, double abs_tol) {
  IntegrationResult res;
  if (lo == hi) {
    res.converged = true;
    return res;
  }
  if (hi < lo) {
    res = integrate_adaptive(f, hi, lo, rel_tol, max_depth, abs_tol);
    res.value = -res.value;
    return res;
  }
  // Map infinite ranges onto bounded ones.
  std::function<double(double)> g;
  double a = lo, b = hi;
  if (std::isinf(lo) && std::isinf(hi)) {
    g = [&f](double t) {
      const double d = 1.0 - t * t;
      return f(t / d) * (1.0 + t * t) / (d * d);
    };
    a = -1.0;
    b = 1.0;
  } else if (std::isinf(hi)) {
    g = [&f, lo](double t) {
      const double d = 1.0 - t;
      return f(lo + t / d) / (d * d);
    };
    a = 0.0;
    b = 1.0;
  } else if (std::isinf(lo)) {
    g = [&f, hi](double t) {
      const double d = 1.0 - t;
      return f(hi - t / d) / (d * d);
    };
    a = 0.0;
    b = 1.0;
  } else {
    g = f;
  }

  const std::size_t max_panels = std::size_t{1} << std::min(max_depth, 14u);
  std::priority_queue<Panel> heap;
  Panel first = gk15_panel(g, a, b);
  heap.push(first);
  double total = first.value, err = first.error;
  const double min_width = (b - a) * std::ldexp(1.0, -static_cast<int>(std::min(max_depth, 60u)));
  while (err > std::max(rel_tol * std::abs(total), abs_tol) && err > 1e-300 && heap.size() < max_panels) {
    Panel worst = heap.top();
    if (worst.hi - worst.lo <= min_width) break;
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = gk15_panel(g, worst.lo, mid);
    const Panel right = gk15_panel(g, mid, worst.hi);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // re-sum for a clean total
  total = 0.0;
  err = 0.0;
  std::vector<Panel> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.lo < r.lo; });
  for (const Panel& p : panels) {
    total += p.value;
    err += p.error;
  }
  res.value = total;
  res.error = err;
  res.converged = std::isfinite(total) && (err <= std::max(rel_tol * std::abs(total), abs_tol) || err <= 1e-300);
  return res;
}

}  // namespace lagvar
