#pragma once

// Orthogonal polynomials, modified Bessel functions and log-Gamma used by
// the Laguerre semigroup kernels.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lagvar {

using Point = std::vector<double>;
using MultiIndex = std::vector<int>;

/// Real polynomial in the monomial basis, constant term first.
class PolyCoeffs {
 public:
  PolyCoeffs() : coeffs_{0.0} {}
  explicit PolyCoeffs(std::vector<double> coeffs);

  static PolyCoeffs constant(double c) { return PolyCoeffs({c}); }
  static PolyCoeffs monomial(int degree, double c = 1.0);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  double coeff(int j) const;
  const std::vector<double>& coeffs() const { return coeffs_; }

  double operator()(double x) const;

  PolyCoeffs derivative(int order = 1) const;
  /// p(x) -> p(x^2)
  PolyCoeffs compose_square() const;
  PolyCoeffs times_x(int power = 1) const;
  PolyCoeffs scaled(double c) const;

  friend PolyCoeffs operator+(const PolyCoeffs& a, const PolyCoeffs& b);
  friend PolyCoeffs operator-(const PolyCoeffs& a, const PolyCoeffs& b);
  friend PolyCoeffs operator*(const PolyCoeffs& a, const PolyCoeffs& b);

 private:
  void trim();
  std::vector<double> coeffs_;
};

/// Type vector alpha in [0, inf)^n together with its derived scalars.
class AlphaParam {
 public:
  explicit AlphaParam(std::vector<double> alpha);

  std::size_t n() const { return alpha_.size(); }
  double operator[](std::size_t j) const { return alpha_[j]; }
  const std::vector<double>& values() const { return alpha_; }
  /// Sum of the entries.
  double hat() const { return hat_; }
  /// log Gamma(alpha_j + 1)
  double log_normalizer(std::size_t j) const { return log_normalizers_[j]; }
  /// n + alpha_hat, the homogeneity exponent of the kernels.
  double homogeneity() const { return static_cast<double>(n()) + hat_; }

 private:
  std::vector<double> alpha_;
  double hat_ = 0.0;
  std::vector<double> log_normalizers_;
};

/// log Gamma(x) for x > 0.
double log_gamma(double x);
/// Principal-branch-free log Gamma(z) for Re z > 0; only exp() of the
/// result is meaningful.
std::complex<double> log_gamma(std::complex<double> z);

/// sqrt(Gamma(alpha+1) k! / Gamma(alpha+k+1)), the factor relating the
/// classical Laguerre polynomial to the normalized one.
double laguerre_scale(int k, double alpha);

/// Normalized Laguerre polynomial L_k^alpha(u) as monomial coefficients,
/// built by the three-term recurrence.
PolyCoeffs laguerre_normalized(int k, double alpha);

/// L_k^alpha(u) evaluated by the forward recurrence (stable for large k).
double laguerre_value(int k, double alpha, double u);

/// j-th derivative in u of L_k^alpha, via d/du L_k^(a) = -L_{k-1}^(a+1).
double laguerre_value_derivative(int k, double alpha, int j, double u);

/// prod_i L_{k_i}^{alpha_i}(x_i^2)
double laguerre_tensor(std::span<const int> k, const AlphaParam& alpha,
                       std::span<const double> x);

/// D_x^beta of the tensor Laguerre function, by the chain rule for
/// u = x^2 and recurrence-evaluated u-derivatives.
double laguerre_tensor_deriv(std::span<const int> k, const AlphaParam& alpha,
                             std::span<const int> beta,
                             std::span<const double> x);

/// d^m/dx^m L_k^alpha(x^2) for k = 0..kmax in one pass (m = 0 gives values).
std::vector<double> laguerre_dx_table(int kmax, double alpha, int m, double x);

/// Physicists' Hermite polynomial H_m.
PolyCoeffs hermite(int m);
/// H_m(x) by recurrence.
double hermite_value(int m, double x);

/// e^{-z} I_nu(z) for nu > -1, z >= 0.
double bessel_i_scaled(double nu, double z);

/// e^{-z} I_nu(z) (z/2)^{-nu}; finite at z = 0 where it equals 1/Gamma(nu+1).
double bessel_i_reduced(double nu, double z);

/// I_{nu+1}(z) / I_nu(z) for z > 0.
double bessel_i_ratio(double nu, double z);

}  // namespace lagvar
