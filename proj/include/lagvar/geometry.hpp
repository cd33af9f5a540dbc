#pragma once

// Measures, the quadratic forms q+-, local/global regions, the cutoff phi,
// the covering ball system and Calderon-Zygmund kernel checks.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lagvar/specfun.hpp"

namespace lagvar {

double norm2(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double distance(std::span<const double> x, std::span<const double> y);

struct QForms {
  double q_plus = 0.0;
  double q_minus = 0.0;
};

/// q+-(x,y,s) = sum x_i^2 + y_i^2 +- 2 x_i y_i s_i
QForms q_forms(std::span<const double> x, std::span<const double> y, std::span<const double> s);

/// Evaluation point (alpha, x, y, s) with cached quadratic quantities.
class KernelContext {
 public:
  KernelContext(const AlphaParam& alpha, Point x, Point y, Point s);

  const AlphaParam& alpha() const { return alpha_; }
  const Point& x() const { return x_; }
  const Point& y() const { return y_; }
  const Point& s() const { return s_; }
  std::size_t n() const { return x_.size(); }

  double x_sq() const { return x_sq_; }
  double y_sq() const { return y_sq_; }
  /// sum x_i y_i s_i
  double xys() const { return xys_; }
  /// |x|^2 + |y|^2
  double a() const { return x_sq_ + y_sq_; }
  /// 2 sum x_i y_i s_i
  double b() const { return 2.0 * xys_; }
  double q_plus() const { return q_plus_; }
  double q_minus() const { return q_minus_; }

 private:
  AlphaParam alpha_;
  Point x_, y_, s_;
  double x_sq_ = 0.0, y_sq_ = 0.0, xys_ = 0.0, q_plus_ = 0.0, q_minus_ = 0.0;
};

struct RegionParams {
  double tau = 1.0;
  double c0 = 9.0;
  /// c0 = 8(n + alpha_hat) + 1
  static RegionParams defaults(const AlphaParam& alpha, double tau = 1.0);
};

enum class Region { local, global };

/// local iff sqrt(q_-) <= c0 tau / (1 + |x| + |y|)
Region region_classify(const KernelContext& ctx, const RegionParams& params);

/// r = q_- (1+|x|+|y|)^2 / c0^2; (x,y,s) is in L_tau iff r <= tau^2.
double region_ratio(const KernelContext& ctx, double c0);

struct CutoffValue {
  double value = 1.0;
  Point grad_x;
  Point grad_y;
};

/// The smooth transition psi: 1 on [0,1], 0 on [4,inf).
double cutoff_psi(double r);
double cutoff_psi_derivative(double r);

/// phi(x,y,s) = psi(q_- (1+|x|+|y|)^2 / c0^2) and its x, y gradients.
CutoffValue cutoff_phi(const KernelContext& ctx, double c0);

/// Density of m_alpha and of mu_alpha at a point.
double malpha_density(const AlphaParam& alpha, std::span<const double> x);
double mualpha_density(const AlphaParam& alpha, std::span<const double> x);

struct BallMeasure {
  double exact = 0.0;
  double closed_form = 0.0;
  double ratio = 0.0;  // exact / closed_form
};

/// m_alpha(B(center, radius) intersected with the positive orthant).
BallMeasure malpha_ball(const AlphaParam& alpha, std::span<const double> center, double radius);

/// Closed comparable form r^n prod (x_i + r)^{2 alpha_i + 1}.
double malpha_ball_comparable(const AlphaParam& alpha, std::span<const double> center,
                              double radius);

struct BallSystem {
  std::vector<Point> centers;
  std::vector<double> radii;
  double overlap_factor = 2.0;
  double cover_gap = 0.0;        // max over probes of the distance to the nearest ball
  int max_multiplicity = 0;      // of {delta B_l} on the probe grid
  double measure_constant = 1.0; // property (iii) constant over the sampled subsets
};

/// Graded cover of (0, bound]^n by balls of radius 1/(2(1+|center|)).
BallSystem build_ball_system(const AlphaParam& alpha, double bound, double delta,
                             int probes_per_axis = 200, std::uint64_t seed = 1);

/// Largest multiplicity of {delta B_l} at the given probe points.
int ball_multiplicity(const BallSystem& sys, double delta, const std::vector<Point>& probes);

struct CzReport {
  std::string check_name;
  int n = 1;
  double alpha_hat = 0.0;
  int samples = 0;
  int skipped = 0;
  double constant = 0.0;
  double refinement_ratio = 1.0;
  bool pass = false;
};

using ScalarKernel = std::function<double(const Point&, const Point&)>;

struct PairSample {
  Point x, y;
};
struct TripleSample {
  Point x, y, z;
};

/// sup over samples of |K(x,y)| m_alpha(B(x,|x-y|)).
CzReport cz_size_check(const AlphaParam& alpha, const ScalarKernel& kernel,
                       const std::vector<PairSample>& samples);

/// sup over samples of |K(x,y)-K(z,y)| |x-y| m_alpha(B(x,|x-y|)) / |x-z|;
/// samples with |x-z| > |x-y|/2 are skipped and counted.
CzReport cz_regularity_check(const AlphaParam& alpha, const ScalarKernel& kernel,
                             const std::vector<TripleSample>& samples);

/// Combines a coarse and a refined report: the refined constant with
/// refinement_ratio = fine/coarse, pass iff finite and within drift.
CzReport cz_refine(const CzReport& coarse, const CzReport& fine, double max_drift);

}  // namespace lagvar
