#pragma once

// Gaussian and tanh-sinh rules plus an adaptive integrator wrapper.

#include <functional>
#include <string>
#include <vector>

namespace lagvar {

enum class RuleKind { gauss_legendre, gauss_laguerre, gauss_jacobi, tanh_sinh };

std::string to_string(RuleKind kind);

/// Nodes and weights for one of the supported weight functions:
///   gauss_legendre   1 on (-1,1)
///   gauss_laguerre   x^a e^{-x} on (0,inf)
///   gauss_jacobi     (1-x)^a (1+x)^b on (-1,1)
///   tanh_sinh        1 on (-1,1), double-exponential panel
struct QuadratureRule {
  RuleKind kind = RuleKind::gauss_legendre;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  int order() const { return static_cast<int>(nodes.size()); }

  template <class F>
  double apply(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// Builds a rule of the given order. a, b are the weight parameters
/// (gauss_laguerre uses a only; gauss_jacobi requires a, b > -1).
QuadratureRule make_rule(RuleKind kind, int order, double a = 0.0, double b = 0.0);

QuadratureRule gauss_legendre(int order);
QuadratureRule gauss_laguerre(int order, double a);
QuadratureRule gauss_jacobi(int order, double a, double b);
QuadratureRule tanh_sinh(int order);

/// Gauss-Jacobi rule built once per (order, a, b) and kept for the process
/// lifetime; safe to call from several threads.
const QuadratureRule& cached_gauss_jacobi(int order, double a, double b);

/// Legendre rule mapped to [lo, hi].
QuadratureRule legendre_on(int order, double lo, double hi);

/// Total mass of the weight of a rule kind.
double weight_mass(RuleKind kind, double a = 0.0, double b = 0.0);

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (15 point) on [lo, hi]; infinite limits allowed.
/// Stops once the error estimate is below max(rel_tol |value|, abs_tol).
IntegrationResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                     double rel_tol = 1e-10, unsigned max_depth = 30,
                                     double abs_tol = 0.0);

}  // namespace lagvar
