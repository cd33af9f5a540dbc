#pragma once

// Variable exponents, discretized functions, modulars and Luxemburg norms.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lagvar/specfun.hpp"

namespace lagvar {

enum class Measure { mu_alpha, m_alpha, lebesgue };
std::string to_string(Measure m);

enum class ExponentKind { constant, decay_power, tabulated, conjugate, lifted };
std::string to_string(ExponentKind k);

/// A variable exponent p(.) with its essential bounds and limit at infinity.
class ExponentField {
 public:
  static ExponentField constant(double p, std::size_t n = 1);
  /// p(x) = p_inf + A / (e + |x|)^q
  static ExponentField decay_power(double p_infty, double A, double q, std::size_t n = 1);
  /// Multilinear interpolation on a tensor grid, clamped to [p-, p+]
  /// outside; values flattened with axis 0 fastest.
  static ExponentField tabulated(std::vector<std::vector<double>> axes, std::vector<double> values,
                                 double p_infty);

  double operator()(std::span<const double> x) const { return eval_(x); }
  std::size_t dim() const { return dim_; }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  double p_infty() const { return p_infty_; }
  ExponentKind kind() const { return kind_; }
  /// (p_infty, A, q) for decay_power fields
  const std::vector<double>& params() const { return params_; }

  friend ExponentField conjugate(const ExponentField& p);
  friend ExponentField lift_exponent_radial(const ExponentField& p, const std::vector<int>& k);

 private:
  ExponentField() = default;
  std::function<double(std::span<const double>)> eval_;
  std::size_t dim_ = 1;
  double p_minus_ = 1.0, p_plus_ = 1.0, p_infty_ = 1.0;
  ExponentKind kind_ = ExponentKind::constant;
  std::vector<double> params_;
};

/// Pointwise Hoelder conjugate; requires p_minus > 1.
ExponentField conjugate(const ExponentField& p);

/// pbar(xbar) = p(|xbar_1|, ..., |xbar_n|) with xbar_i in R^{k_i}.
ExponentField lift_exponent_radial(const ExponentField& p, const std::vector<int>& k);

/// Tensor quadrature grid; weights already carry the measure density.
struct TensorGrid {
  Measure measure = Measure::mu_alpha;
  std::vector<std::vector<double>> nodes;
  std::vector<std::vector<double>> weights;

  std::size_t dim() const { return nodes.size(); }
  std::size_t size() const;
  Point point(std::size_t flat) const;
  double weight(std::size_t flat) const;
};

/// mu_alpha grid from Gauss-Laguerre in u = x^2 (exact for polynomials in x^2).
TensorGrid mu_grid_laguerre(const AlphaParam& alpha, int order);
/// Composite Gauss-Legendre on (0, bound] per axis with the density of the
/// requested measure folded into the weights.
TensorGrid panel_grid(const AlphaParam& alpha, Measure measure, double bound, int panels,
                      int order);

struct DiscreteFunction {
  TensorGrid grid;
  std::vector<double> values;

  static DiscreteFunction sample(const TensorGrid& grid,
                                 const std::function<double(const Point&)>& f);
  bool is_zero() const;
};

/// Deterministic pairwise sum.
double pairwise_sum(std::span<const double> v);

/// rho(f) = int |f|^{p(x)} d measure; +inf on overflow.
double modular(const DiscreteFunction& f, const ExponentField& p);
/// rho(f / lambda)
double modular_scaled(const DiscreteFunction& f, const ExponentField& p, double lambda);

struct NormResult {
  double norm = 0.0;
  double modular_at_norm = 0.0;
  int iterations = 0;
};

/// inf{lambda > 0 : rho(f/lambda) <= 1} by bisection in log lambda.
NormResult luxemburg_norm(const DiscreteFunction& f, const ExponentField& p);

/// Classical L^p norm on the same grid, for constant p.
double classical_norm(const DiscreteFunction& f, double p);

struct HolderReport {
  double lhs = 0.0;    // int |f g|
  double bound = 0.0;  // 2 |f|_p |g|_p'
  double ratio = 0.0;
  bool pass = true;
};

HolderReport holder_check(const DiscreteFunction& f, const DiscreteFunction& g,
                          const ExponentField& p);

enum class ExponentClass { LH0, LHinf, Pe_inf };
std::string to_string(ExponentClass c);

struct ClassConstant {
  double constant = 0.0;
  bool pass = false;
  int probes_used = 0;
};

/// Empirical class constants:
///   LH0     sup |p(x)-p(y)| (-log|x-y|) over probe pairs with 0<|x-y|<1/2
///   LHinf   sup |p(x)-p_inf| log(e+|x|)
///   Pe_inf  sup |p(x)-p_inf| |x|^2
ClassConstant class_constants(const ExponentField& p, ExponentClass which,
                              const std::vector<Point>& probes);

}  // namespace lagvar
