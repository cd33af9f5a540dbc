#pragma once

// Maximal operators and the sup analysis of the global heat kernel, the
// auxiliary global operator H, Riesz transforms, Littlewood-Paley g-functions
// and multipliers of Laplace transform type.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "lagvar/geometry.hpp"
#include "lagvar/semigroup.hpp"
#include "lagvar/specfun.hpp"
#include "lagvar/varlp.hpp"

namespace lagvar {

/// Finite Laguerre expansion sum_k c_k L_k.
struct Expansion {
  AlphaParam alpha{std::vector<double>{0.0}};
  std::vector<MultiIndex> indices;
  std::vector<double> coeffs;

  /// All multi-indices with |k| <= degree, ordered by |k| then lexicographically.
  static std::vector<MultiIndex> indices_up_to(std::size_t n, int degree);
  static Expansion single(const AlphaParam& alpha, const MultiIndex& k, double c = 1.0);
  /// c_k = <f, L_k> on the grid of f (which must carry mu_alpha).
  static Expansion project(const DiscreteFunction& f, const AlphaParam& alpha, int degree);

  double operator()(const Point& x) const;
  int max_degree() const;
  /// sum c_k e^{-t |k|} L_k(x)
  double heat(double t, const Point& x) const;
  /// sum c_k e^{-t sqrt|k|} L_k(x)
  double poisson(double t, const Point& x) const;
  /// L^2(mu_alpha) norm by orthonormality.
  double l2_norm() const;
  DiscreteFunction sample(const TensorGrid& grid) const;
};

int index_hat(const MultiIndex& k);

/// Per-axis tables d^{beta_i}/dx_i^{beta_i} L_k(x_i^2), k = 0..degree.
std::vector<std::vector<double>> axis_tables(const AlphaParam& alpha, int degree, const MultiIndex& beta,
                                             const Point& x);
/// prod_i tab[i][k_i]
double tensor_from(const std::vector<std::vector<double>>& tab, const MultiIndex& k);

enum class VtBranch { b_nonpositive, b_positive };
std::string to_string(VtBranch b);

/// Analysis of v(t) = e^{-u(t)} / t^{n+alpha_hat}, u(t) = a/t - b sqrt(1-t)/t - |x|^2,
/// on t in (0,1).
struct VtAnalysis {
  double a = 0.0, b = 0.0;
  double u0 = 0.0;
  double t0 = 1.0;
  double sup_value = 0.0;  // e^{-|y|^2} or v(t0)
  double grid_sup = 0.0;   // max of v on the log grid
  VtBranch branch = VtBranch::b_nonpositive;
};

double vt_value(const KernelContext& ctx, double t);

/// Requires ctx global for c0 (ConstructionError otherwise). grid_points
/// log-spaced in (1e-6, 1-1e-6).
VtAnalysis vt_analyze(const KernelContext& ctx, double c0, int grid_points = 2000);

/// H_{alpha,eps}(x,y,s).
double h_kernel(double epsilon, const KernelContext& ctx);

struct MaximalBoundReport {
  int samples = 0;
  int rejected = 0;       // not in G_1
  double constant = 0.0;  // sup grid_sup / H_{alpha,0}
  double constant_fine = 0.0;
  double refinement_ratio = 1.0;
  double comparability = 0.0;  // max over b>0 samples of max(g/v0, v0/g)
  double comparability_fine = 0.0;
  double b_nonpositive_excess = 0.0;  // max grid_sup e^{|y|^2} - 1 on b<=0 samples
  bool pass = false;
};

/// Domination of the global heat-maximal kernel by H_{alpha,0}; evaluated at
/// grid_points and 2 grid_points.
MaximalBoundReport global_maximal_bound_check(const AlphaParam& alpha,
                                              const std::vector<KernelContext>& samples,
                                              double c0, int grid_points = 2000);

/// sup over t_grid (and the limits t -> 0, t -> inf) of |W_t f(x)|, with a
/// golden-section polish around the grid maximum.
double maximal_heat(const Expansion& f, const Point& x, const std::vector<double>& t_grid);
double maximal_poisson(const Expansion& f, const Point& x, const std::vector<double>& t_grid);

/// Grid version: max over t_grid of |heat_apply(f, t)(x)| at every grid point.
DiscreteFunction maximal_heat_on_grid(const DiscreteFunction& f, const AlphaParam& alpha,
                                      const std::vector<double>& t_grid);

std::vector<double> log_time_grid(double lo, double hi, int points);

/// H_{alpha,eps}(x,y) = int H(x,y,s)(1-phi) Pi_alpha(s) ds by Gauss-Jacobi.
double h_kernel_integrated(const AlphaParam& alpha, double epsilon, double c0, const Point& x,
                           const Point& y, int order = 48);

struct HApplyResult {
  DiscreteFunction value;
  bool epsilon_admissible = true;  // eps < min(1/(p-)', 1/(n+alpha_hat))
};

/// int H_{alpha,eps}(x,y) f(y) dm_alpha(y) at the grid points of out_grid.
/// f must live on an m_alpha grid.
HApplyResult h_apply(const DiscreteFunction& f, const AlphaParam& alpha, double epsilon,
                     double c0, const TensorGrid& out_grid, double p_minus = 2.0);

/// a_eps = (1-eps)/2 - |1/p_inf - (1-eps)/2|
double a_epsilon(double epsilon, double p_infty);
/// 0.5 min(1/(p-)', 1/(n+alpha_hat))
double default_epsilon(double p_minus, const AlphaParam& alpha);

/// sum_{k != 0} |k|^{-|beta|/2} c_k D^beta L_k at x.
double riesz_spectral(const Expansion& f, const MultiIndex& beta, const Point& x);
/// Riesz expansion coefficients of D^beta applied: returns values on a grid.
DiscreteFunction riesz_spectral_on_grid(const Expansion& f, const MultiIndex& beta,
                                        const TensorGrid& grid);

struct RieszKernelValue {
  double value = 0.0;
  bool flagged = false;
};

/// Off-diagonal Riesz kernel with respect to mu_alpha,
/// (1/Gamma(|beta|/2)) int_0^inf t^{|beta|/2-1} D_x^beta W_t(x,y) dt, with
/// D_x^beta W_t from the Hermite form of the s-integral.
RieszKernelValue riesz_kernel(const AlphaParam& alpha, const MultiIndex& beta, const Point& x,
                              const Point& y);

/// D_x^beta W_t(x,y) from the Hermite form.
double heat_kernel_dx(const AlphaParam& alpha, const MultiIndex& beta, double t, const Point& x,
                      const Point& y);

/// g^{beta,k}(f)(x).
double g_function(const Expansion& f, const MultiIndex& beta, int k, const Point& x,
                  int order = 96);

struct MultiplierSpec {
  enum class Tag { imaginary_power, custom };
  Tag tag = Tag::custom;
  double beta = 0.0;  // imaginary power exponent
  std::function<std::complex<double>(double)> phi;
  double phi_sup = 1.0;

  static MultiplierSpec imaginary_power(double beta);
  static MultiplierSpec custom(std::function<std::complex<double>(double)> phi, double sup);

  /// m(lambda) = lambda int phi(y) e^{-lambda y} dy; m(0) = 0.
  std::complex<double> m(double lambda) const;
};

struct ComplexExpansion {
  AlphaParam alpha{std::vector<double>{0.0}};
  std::vector<MultiIndex> indices;
  std::vector<std::complex<double>> coeffs;

  std::complex<double> operator()(const Point& x) const;
  double l2_norm() const;
  /// |T f| sampled on the grid
  DiscreteFunction modulus(const TensorGrid& grid) const;
};

ComplexExpansion multiplier_apply(const Expansion& f, const MultiplierSpec& spec);

struct MultiplierKernelValue {
  std::complex<double> value;
  bool flagged = false;
};

/// int phi(t) (-d/dt) W_t(x,y) dt.
MultiplierKernelValue multiplier_kernel(const AlphaParam& alpha, const MultiplierSpec& spec,
                                        const Point& x, const Point& y);

/// sup over t of the local heat kernel W_loc(x,y) as a kernel against
/// m_alpha; the t grid is log-spaced in 1-e^{-t} over (1e-6, 1-1e-6) with
/// grid_points points and a golden-section polish.
double local_heat_sup_kernel(const AlphaParam& alpha, double c0, const Point& x, const Point& y,
                             int grid_points);

}  // namespace lagvar
