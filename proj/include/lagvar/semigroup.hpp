#pragma once

// Heat kernel in three forms, its local/global split, semigroup application,
// and the Poisson semigroup by subordination.

#include <functional>
#include <vector>

#include "lagvar/geometry.hpp"
#include "lagvar/quadrature.hpp"
#include "lagvar/specfun.hpp"
#include "lagvar/varlp.hpp"

namespace lagvar {

enum class HeatMethod { bessel_product, spectral, s_integral };
std::string to_string(HeatMethod m);

struct HeatEval {
  AlphaParam alpha;
  double t = 1.0;
  HeatMethod method = HeatMethod::bessel_product;
  int k_max = 60;  // spectral truncation on |k|
  int order = 0;   // s-integral Gauss-Jacobi order per axis; 0 picks one from the data
};

/// Below this time the kernel is treated as near-singular and flagged.
inline constexpr double kSmallTime = 1e-6;

struct KernelResult {
  double value = 0.0;
  bool flagged = false;  // small t, overflow, or spectral truncation too coarse
};

/// W_t(x,y) with respect to mu_alpha.
KernelResult heat_kernel(const HeatEval& eval, const Point& x, const Point& y);

/// log W_t(x,y) by the Bessel-product form.
double heat_kernel_log(const AlphaParam& alpha, double t, const Point& x, const Point& y);

/// d/dt W_t(x,y) from the analytic derivative of the Bessel-product form.
double heat_kernel_dt(const AlphaParam& alpha, double t, const Point& x, const Point& y);

/// Spectral tail bound sum_{|k|>K} e^{-|k| t} |L_k(x) L_k(y)|, estimated with
/// the terms up to 4K.
double spectral_tail_bound(const AlphaParam& alpha, double t, int k_max, const Point& x,
                           const Point& y);

struct SplitValue {
  double local_part = 0.0;
  double global_part = 0.0;
  bool flagged = false;
};

/// The s-integral weighted by phi and by 1 - phi (c0 from RegionParams).
SplitValue heat_kernel_split(const HeatEval& eval, double c0, const Point& x, const Point& y);

/// Sum_k w_k W_t(x, y_k) f(y_k) on the grid of f, which must carry mu_alpha.
std::vector<double> heat_apply(const DiscreteFunction& f, const HeatEval& eval,
                               const std::vector<Point>& xs);

/// Heat application returned on the grid of f itself.
DiscreteFunction heat_apply_on_grid(const DiscreteFunction& f, const HeatEval& eval);

/// Quadrature for (1/sqrt(pi)) int_0^inf e^{-v} v^{-1/2} g(t^2/(4v)) dv, the
/// subordination integral after u = t^2/(4v).
struct SubordinationRule {
  enum class Kind { log_panel, gauss_laguerre };
  Kind kind = Kind::log_panel;
  std::vector<double> v;        // nodes in v
  std::vector<double> weights;  // include e^{-v} v^{-1/2} / sqrt(pi) and the Jacobian
  int order() const { return static_cast<int>(v.size()); }

  /// Composite Gauss-Legendre in log v over [-60, 4] (default 24 panels of 16).
  static SubordinationRule log_panel(int panels = 24, int per_panel = 16);
  /// Generalized Gauss-Laguerre(-1/2) in v.
  static SubordinationRule laguerre(int order = 64);

  /// (1/sqrt(pi)) int e^{-v} v^{-1/2} g(t^2/(4v)) dv
  double apply(double t, const std::function<double(double)>& g) const;
  /// The mass check: t/(2 sqrt(pi)) int e^{-t^2/4u} u^{-3/2} du.
  double mass(double t) const;
};

KernelResult poisson_kernel(const AlphaParam& alpha, double t, const Point& x, const Point& y,
                            const SubordinationRule& rule);

/// k-th t-derivative of the subordination weight applied to g(u):
/// d^k/dt^k (t/(2 sqrt pi)) int e^{-t^2/4u} u^{-3/2} g(u) du, 1 <= k <= 8.
double subordinate_dt(int k, double t, const std::function<double(double)>& g,
                      const SubordinationRule& rule);

/// d^k/dt^k P_t(x,y).
double dt_poisson(const AlphaParam& alpha, int k, double t, const Point& x, const Point& y,
                  const SubordinationRule& rule);

struct DerivativeStructure {
  double fit_residual = 0.0;  // relative residual of the degree-4 fit
  int sign_changes = 0;
  std::vector<double> coeffs;  // fitted coefficients in w = e^{-z/2}, constant first
};

/// d/dz of F(z) = exp(-q_-(e^{-z/2}x, y, s)/(1-e^{-z})) / (1-e^{-z})^{n+alpha_hat}
/// divided by F, times (1 - e^{-z})^2, fitted by a quartic in e^{-z/2}.
DerivativeStructure derivative_structure_check(const KernelContext& ctx, int z_samples = 200);

}  // namespace lagvar
