#include "lagvar/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lagvar/errors.hpp"

namespace lagvar {

// ---------------------------------------------------------------------------
// PolyCoeffs

PolyCoeffs::PolyCoeffs(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

PolyCoeffs PolyCoeffs::monomial(int degree, double c) {
  if (degree < 0) throw DomainError("monomial degree must be nonnegative");
  std::vector<double> v(static_cast<std::size_t>(degree) + 1, 0.0);
  v.back() = c;
  return PolyCoeffs(std::move(v));
}

void PolyCoeffs::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double PolyCoeffs::coeff(int j) const {
  if (j < 0 || j > degree()) return 0.0;
  return coeffs_[static_cast<std::size_t>(j)];
}

double PolyCoeffs::operator()(double x) const {
  long double acc = 0.0L;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return static_cast<double>(acc);
}

PolyCoeffs PolyCoeffs::derivative(int order) const {
  if (order < 0) throw DomainError("derivative order must be nonnegative");
  std::vector<double> c = coeffs_;
  for (int r = 0; r < order; ++r) {
    if (c.size() <= 1) return PolyCoeffs::constant(0.0);
    std::vector<double> d(c.size() - 1);
    for (std::size_t j = 1; j < c.size(); ++j) d[j - 1] = static_cast<double>(j) * c[j];
    c = std::move(d);
  }
  return PolyCoeffs(std::move(c));
}

PolyCoeffs PolyCoeffs::compose_square() const {
  std::vector<double> c(2 * coeffs_.size() - 1, 0.0);
  for (std::size_t j = 0; j < coeffs_.size(); ++j) c[2 * j] = coeffs_[j];
  return PolyCoeffs(std::move(c));
}

PolyCoeffs PolyCoeffs::times_x(int power) const {
  if (power < 0) throw DomainError("times_x power must be nonnegative");
  if (is_zero()) return *this;
  std::vector<double> c(static_cast<std::size_t>(power), 0.0);
  c.insert(c.end(), coeffs_.begin(), coeffs_.end());
  return PolyCoeffs(std::move(c));
}

PolyCoeffs PolyCoeffs::scaled(double s) const {
  std::vector<double> c = coeffs_;
  for (double& v : c) v *= s;
  return PolyCoeffs(std::move(c));
}

PolyCoeffs operator+(const PolyCoeffs& a, const PolyCoeffs& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t j = 0; j < a.coeffs_.size(); ++j) c[j] += a.coeffs_[j];
  for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[j] += b.coeffs_[j];
  return PolyCoeffs(std::move(c));
}

PolyCoeffs operator-(const PolyCoeffs& a, const PolyCoeffs& b) { return a + b.scaled(-1.0); }

PolyCoeffs operator*(const PolyCoeffs& a, const PolyCoeffs& b) {
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return PolyCoeffs(std::move(c));
}

// ---------------------------------------------------------------------------
// AlphaParam

AlphaParam::AlphaParam(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.empty()) throw DimensionError("alpha must have at least one entry");
  for (double a : alpha_) {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw DomainError("alpha entries must be finite and >= 0, got " + std::to_string(a));
    hat_ += a;
    log_normalizers_.push_back(log_gamma(a + 1.0));
  }
}

// ---------------------------------------------------------------------------
// Gamma

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
  int sign = 1;
  return ::lgamma_r(x, &sign);
}

std::complex<double> log_gamma(std::complex<double> z) {
  if (!(z.real() > 0.0)) throw DomainError("complex log_gamma requires Re z > 0");
  // Shift to Re z >= 15 and apply the Stirling series there.
  std::complex<double> shift = 0.0;
  while (z.real() < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  const std::complex<double> inv = 1.0 / z;
  const std::complex<double> inv2 = inv * inv;
  const std::complex<double> series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 + inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0)))));
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series - shift;
}

// ---------------------------------------------------------------------------
// Laguerre

namespace {

void check_laguerre_args(int k, double alpha) {
  if (k < 0) throw DomainError("Laguerre degree must be nonnegative");
  if (!(alpha >= 0.0)) throw DomainError("Laguerre type alpha must be >= 0");
}

// Classical (Szego-normalized) generalized Laguerre polynomial.
double classical_laguerre(int k, double a, double u) {
  if (k < 0) return 0.0;
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = 1.0 + a - u;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + a - u) * cur - (j + a) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

double laguerre_scale(int k, double alpha) {
  check_laguerre_args(k, alpha);
  return std::exp(0.5 * (log_gamma(alpha + 1.0) + log_gamma(k + 1.0) - log_gamma(alpha + k + 1.0)));
}

PolyCoeffs laguerre_normalized(int k, double alpha) {
  check_laguerre_args(k, alpha);
  PolyCoeffs prev = PolyCoeffs::constant(1.0);
  if (k == 0) return prev;
  PolyCoeffs cur({1.0 + alpha, -1.0});
  for (int j = 1; j < k; ++j) {
    PolyCoeffs next = (cur.scaled(2.0 * j + 1.0 + alpha) - cur.times_x() - prev.scaled(j + alpha))
                          .scaled(1.0 / (j + 1.0));
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur.scaled(laguerre_scale(k, alpha));
}

double laguerre_value(int k, double alpha, double u) {
  check_laguerre_args(k, alpha);
  return laguerre_scale(k, alpha) * classical_laguerre(k, alpha, u);
}

double laguerre_value_derivative(int k, double alpha, int j, double u) {
  check_laguerre_args(k, alpha);
  if (j < 0) throw DomainError("derivative order must be nonnegative");
  if (j > k) return 0.0;
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  return laguerre_scale(k, alpha) * sign * classical_laguerre(k - j, alpha + j, u);
}

namespace {

void check_dims(std::size_t a, std::size_t b, std::size_t c, const char* what) {
  if (a != b || a != c) throw DimensionError(std::string(what) + ": dimension mismatch");
}

double factorial(int m) { return std::tgamma(m + 1.0); }

// d^m/dx^m of g(x^2), where g^(j)(u) is supplied by gj.
template <class G>
double chain_square(int m, double x, G&& gj) {
  const double u = x * x;
  double sum = 0.0;
  for (int j = (m + 1) / 2; j <= m; ++j) {
    const double c = factorial(m) / (factorial(2 * j - m) * factorial(m - j));
    sum += c * std::pow(2.0 * x, 2 * j - m) * gj(j, u);
  }
  return sum;
}

}  // namespace

double laguerre_tensor(std::span<const int> k, const AlphaParam& alpha, std::span<const double> x) {
  check_dims(k.size(), alpha.n(), x.size(), "laguerre_tensor");
  double prod = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) prod *= laguerre_value(k[i], alpha[i], x[i] * x[i]);
  return prod;
}

double laguerre_tensor_deriv(std::span<const int> k, const AlphaParam& alpha,
                             std::span<const int> beta, std::span<const double> x) {
  check_dims(k.size(), alpha.n(), x.size(), "laguerre_tensor_deriv");
  if (beta.size() != k.size()) throw DimensionError("laguerre_tensor_deriv: beta dimension mismatch");
  double prod = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (beta[i] < 0) throw DomainError("derivative multi-index must be nonnegative");
    const int ki = k[i];
    const double ai = alpha[i];
    prod *= chain_square(beta[i], x[i], [&](int j, double u) {
      return laguerre_value_derivative(ki, ai, j, u);
    });
    if (prod == 0.0) break;
  }
  return prod;
}

std::vector<double> laguerre_dx_table(int kmax, double alpha, int m, double x) {
  check_laguerre_args(kmax, alpha);
  if (m < 0) throw DomainError("derivative order must be nonnegative");
  const double u = x * x;
  // classical L_{k-j}^{(alpha+j)}(u) for every k, one recurrence per j
  std::vector<std::vector<double>> cls(static_cast<std::size_t>(m) + 1);
  for (int j = (m + 1) / 2; j <= m; ++j) {
    auto& row = cls[static_cast<std::size_t>(j)];
    row.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
    const double a = alpha + j;
    double prev = 0.0, cur = 1.0;
    for (int k = j; k <= kmax; ++k) {
      const int d = k - j;
      if (d == 0) {
        cur = 1.0;
      } else {
        const double next = ((2.0 * (d - 1) + 1.0 + a - u) * cur - (d - 1 + a) * prev) / d;
        prev = cur;
        cur = next;
      }
      row[static_cast<std::size_t>(k)] = cur;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(kmax) + 1);
  for (int k = 0; k <= kmax; ++k) {
    const double sc = laguerre_scale(k, alpha);
    out[static_cast<std::size_t>(k)] = sc * chain_square(m, x, [&](int j, double) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      return j > k ? 0.0 : sign * cls[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hermite

PolyCoeffs hermite(int m) {
  if (m < 0) throw DomainError("Hermite degree must be nonnegative");
  PolyCoeffs prev = PolyCoeffs::constant(1.0);
  if (m == 0) return prev;
  PolyCoeffs cur({0.0, 2.0});
  for (int j = 1; j < m; ++j) {
    PolyCoeffs next = cur.times_x().scaled(2.0) - prev.scaled(2.0 * j);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

double hermite_value(int m, double x) {
  if (m < 0) throw DomainError("Hermite degree must be nonnegative");
  double prev = 1.0;
  if (m == 0) return prev;
  double cur = 2.0 * x;
  for (int j = 1; j < m; ++j) {
    const double next = 2.0 * x * cur - 2.0 * j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Modified Bessel I

namespace {

// Series below, large-argument expansion above. The expansion's first terms
// scale like nu^2/z, so the switch moves out with the order.
double bessel_switch(double nu) { return 15.0 + nu * nu; }

void check_bessel(double nu, double z) {
  if (!(nu > -1.0)) throw DomainError("bessel_i requires nu > -1");
  if (!(z >= 0.0)) throw DomainError("bessel_i requires z >= 0");
}

// e^{-z} sum_k (z^2/4)^k / (k! Gamma(k+nu+1)); all terms positive.
double reduced_series(double nu, double z) {
  const double q = 0.25 * z * z;
  double term = std::exp(-z - log_gamma(nu + 1.0));
  double sum = term;
  for (int k = 1; k < 10000; ++k) {
    term *= q / (k * (k + nu));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// Large-argument expansion of e^{-z} I_nu(z); truncated at the smallest term.
double scaled_asymptotic(double nu, double z) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * z);
    if (std::abs(next) >= std::abs(last) && k > static_cast<int>(nu) + 1) break;
    term = next;
    sum += term;
    last = std::abs(term);
    if (last < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * z);
}

}  // namespace

double bessel_i_scaled(double nu, double z) {
  check_bessel(nu, z);
  if (z == 0.0) return nu == 0.0 ? 1.0 : (nu > 0.0 ? 0.0 : INFINITY);
  if (z <= bessel_switch(nu)) return reduced_series(nu, z) * std::pow(0.5 * z, nu);
  return scaled_asymptotic(nu, z);
}

double bessel_i_reduced(double nu, double z) {
  check_bessel(nu, z);
  if (z <= bessel_switch(nu)) return reduced_series(nu, z);
  return scaled_asymptotic(nu, z) * std::exp(-nu * std::log(0.5 * z));
}

double bessel_i_ratio(double nu, double z) {
  check_bessel(nu, z);
  if (!(z > 0.0)) throw DomainError("bessel_i_ratio requires z > 0");
  if (z <= bessel_switch(nu)) return 0.5 * z * reduced_series(nu + 1.0, z) / reduced_series(nu, z);
  return scaled_asymptotic(nu + 1.0, z) / scaled_asymptotic(nu, z);
}

}  // namespace lagvar
