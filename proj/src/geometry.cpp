#include "lagvar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lagvar/errors.hpp"
#include "lagvar/quadrature.hpp"

namespace lagvar {

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

QForms q_forms(std::span<const double> x, std::span<const double> y, std::span<const double> s) {
  if (x.size() != y.size() || x.size() != s.size()) throw DimensionError("q_forms: dimension mismatch");
  QForms q;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double base = x[i] * x[i] + y[i] * y[i];
    const double cross = 2.0 * x[i] * y[i] * s[i];
    q.q_plus += base + cross;
    // (x - y s)^2 + y^2 (1 - s^2) avoids cancellation near s = 1
    const double d = x[i] - y[i] * s[i];
    q.q_minus += d * d + y[i] * y[i] * (1.0 - s[i]) * (1.0 + s[i]);
  }
  q.q_plus = std::max(q.q_plus, 0.0);
  return q;
}

KernelContext::KernelContext(const AlphaParam& alpha, Point x, Point y, Point s)
    : alpha_(alpha), x_(std::move(x)), y_(std::move(y)), s_(std::move(s)) {
  if (x_.size() != alpha_.n() || y_.size() != alpha_.n() || s_.size() != alpha_.n())
    throw DimensionError("KernelContext: dimension mismatch");
  for (double v : s_)
    if (!(v >= -1.0 && v <= 1.0)) throw DomainError("KernelContext: s must lie in [-1,1]^n");
  x_sq_ = dot(x_, x_);
  y_sq_ = dot(y_, y_);
  for (std::size_t i = 0; i < x_.size(); ++i) xys_ += x_[i] * y_[i] * s_[i];
  const QForms q = q_forms(x_, y_, s_);
  q_plus_ = q.q_plus;
  q_minus_ = q.q_minus;
}

RegionParams RegionParams::defaults(const AlphaParam& alpha, double tau) {
  return RegionParams{tau, 8.0 * alpha.homogeneity() + 1.0};
}

double region_ratio(const KernelContext& ctx, double c0) {
  const double l = 1.0 + std::sqrt(ctx.x_sq()) + std::sqrt(ctx.y_sq());
  return ctx.q_minus() * l * l / (c0 * c0);
}

Region region_classify(const KernelContext& ctx, const RegionParams& params) {
  const double l = 1.0 + std::sqrt(ctx.x_sq()) + std::sqrt(ctx.y_sq());
  return std::sqrt(ctx.q_minus()) <= params.c0 * params.tau / l ? Region::local : Region::global;
}

namespace {

double bump_h(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double bump_h_derivative(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }

}  // namespace

double cutoff_psi(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 4.0) return 0.0;
  const double a = bump_h(4.0 - r), b = bump_h(r - 1.0);
  return a / (a + b);
}

double cutoff_psi_derivative(double r) {
  if (r <= 1.0 || r >= 4.0) return 0.0;
  const double a = bump_h(4.0 - r), b = bump_h(r - 1.0);
  const double da = -bump_h_derivative(4.0 - r), db = bump_h_derivative(r - 1.0);
  const double s = a + b;
  return (da * b - a * db) / (s * s);
}

CutoffValue cutoff_phi(const KernelContext& ctx, double c0) {
  const std::size_t n = ctx.n();
  CutoffValue out;
  out.grad_x.assign(n, 0.0);
  out.grad_y.assign(n, 0.0);
  const double r = region_ratio(ctx, c0);
  out.value = cutoff_psi(r);
  const double dpsi = cutoff_psi_derivative(r);
  if (dpsi == 0.0) return out;
  const double nx = std::sqrt(ctx.x_sq()), ny = std::sqrt(ctx.y_sq());
  const double l = 1.0 + nx + ny;
  const double c2 = c0 * c0;
  const auto& x = ctx.x();
  const auto& y = ctx.y();
  const auto& s = ctx.s();
  for (std::size_t i = 0; i < n; ++i) {
    const double dqx = 2.0 * (x[i] - y[i] * s[i]);
    const double dqy = 2.0 * (y[i] - x[i] * s[i]);
    const double dlx = nx > 0.0 ? x[i] / nx : 0.0;
    const double dly = ny > 0.0 ? y[i] / ny : 0.0;
    out.grad_x[i] = dpsi * (dqx * l * l + ctx.q_minus() * 2.0 * l * dlx) / c2;
    out.grad_y[i] = dpsi * (dqy * l * l + ctx.q_minus() * 2.0 * l * dly) / c2;
  }
  return out;
}

double malpha_density(const AlphaParam& alpha, std::span<const double> x) {
  double d = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) d *= std::pow(x[i], 2.0 * alpha[i] + 1.0);
  return d;
}

double mualpha_density(const AlphaParam& alpha, std::span<const double> x) {
  double logd = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = std::max(x[i], 1e-300);
    logd += std::log(2.0) + (2.0 * alpha[i] + 1.0) * std::log(xi) - xi * xi - alpha.log_normalizer(i);
  }
  return std::exp(logd);
}

namespace {

// m_alpha of the ball of the given radius about c[first..], restricted to
// the positive orthant, in the trailing coordinates.
double ball_measure_rec(const AlphaParam& alpha, std::span<const double> c, std::size_t first,
                        double radius, bool& ok) {
  const std::size_t i = first;
  const double p = 2.0 * alpha[i] + 2.0;
  const double lo = std::max(0.0, c[i] - radius), hi = c[i] + radius;
  if (hi <= 0.0) return 0.0;
  if (i + 1 == c.size()) return (std::pow(hi, p) - std::pow(lo, p)) / p;
  auto f = [&](double xi) {
    const double d = xi - c[i];
    const double rr = radius * radius - d * d;
    if (rr <= 0.0) return 0.0;
    return std::pow(xi, p - 1.0) * ball_measure_rec(alpha, c, i + 1, std::sqrt(rr), ok);
  };
  const IntegrationResult res = integrate_adaptive(f, lo, hi, 1e-9, 40);
  if (!res.converged) ok = false;
  return res.value;
}

}  // namespace

double malpha_ball_comparable(const AlphaParam& alpha, std::span<const double> center,
                              double radius) {
  double v = std::pow(radius, static_cast<double>(center.size()));
  for (std::size_t i = 0; i < center.size(); ++i)
    v *= std::pow(center[i] + radius, 2.0 * alpha[i] + 1.0);
  return v;
}

BallMeasure malpha_ball(const AlphaParam& alpha, std::span<const double> center, double radius) {
  if (center.size() != alpha.n()) throw DimensionError("malpha_ball: dimension mismatch");
  if (!(radius > 0.0)) throw DomainError("malpha_ball: radius must be positive");
  bool ok = true;
  BallMeasure m;
  m.exact = ball_measure_rec(alpha, center, 0, radius, ok);
  if (!ok) throw AccuracyError("malpha_ball: adaptive refinement did not converge");
  m.closed_form = malpha_ball_comparable(alpha, center, radius);
  m.ratio = m.exact / m.closed_form;
  return m;
}

namespace {

struct Box {
  Point lo, hi;
};

void subdivide(const Box& box, std::vector<Point>& centers, int depth) {
  const std::size_t n = box.lo.size();
  Point c(n);
  double half_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = 0.5 * (box.lo[i] + box.hi[i]);
    half_diag += 0.25 * (box.hi[i] - box.lo[i]) * (box.hi[i] - box.lo[i]);
  }
  half_diag = std::sqrt(half_diag);
  if (half_diag <= 1.0 / (2.0 * (1.0 + norm2(c))) || depth > 40) {
    centers.push_back(std::move(c));
    return;
  }
  // split along every axis
  const std::size_t count = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < count; ++mask) {
    Box child{box.lo, box.hi};
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i))
        child.lo[i] = c[i];
      else
        child.hi[i] = c[i];
    }
    subdivide(child, centers, depth + 1);
  }
}

std::vector<Point> probe_grid(std::size_t n, double bound, int per_axis) {
  std::vector<Point> probes;
  std::vector<int> idx(n, 0);
  while (true) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = bound * (idx[i] + 0.5) / per_axis;
    probes.push_back(std::move(p));
    std::size_t i = 0;
    while (i < n && ++idx[i] == per_axis) idx[i++] = 0;
    if (i == n) break;
  }
  return probes;
}

}  // namespace

int ball_multiplicity(const BallSystem& sys, double delta, const std::vector<Point>& probes) {
  int worst = 0;
  for (const Point& p : probes) {
    int count = 0;
    for (std::size_t l = 0; l < sys.centers.size(); ++l)
      if (distance(p, sys.centers[l]) < delta * sys.radii[l]) ++count;
    worst = std::max(worst, count);
  }
  return worst;
}

BallSystem build_ball_system(const AlphaParam& alpha, double bound, double delta,
                             int probes_per_axis, std::uint64_t seed) {
  if (!(bound > 0.0)) throw DomainError("build_ball_system: bound must be positive");
  if (!(delta > 1.0)) throw DomainError("build_ball_system: delta must exceed 1");
  const std::size_t n = alpha.n();
  BallSystem sys;
  sys.overlap_factor = delta;
  subdivide(Box{Point(n, 0.0), Point(n, bound)}, sys.centers, 0);
  for (const Point& c : sys.centers) sys.radii.push_back(1.0 / (2.0 * (1.0 + norm2(c))));

  const std::vector<Point> probes = probe_grid(n, bound, probes_per_axis);
  double gap = 0.0;
  for (const Point& p : probes) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < sys.centers.size(); ++l)
      best = std::min(best, distance(p, sys.centers[l]) - sys.radii[l]);
    gap = std::max(gap, best);
  }
  sys.cover_gap = std::max(gap, 0.0);
  if (sys.cover_gap > 1e-12) throw ConstructionError("build_ball_system: probe not covered");
  sys.max_multiplicity = ball_multiplicity(sys, delta, probes);

  // property (iii): mu_alpha(E) vs e^{-|x(l)|^2} m_alpha(E) on random boxes E in B_l
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const QuadratureRule gl = gauss_legendre(8);
  double worst = 1.0;
  for (std::size_t l = 0; l < sys.centers.size(); ++l) {
    const Point& c = sys.centers[l];
    const double side = sys.radii[l] / std::sqrt(static_cast<double>(n));
    for (int rep = 0; rep < 4; ++rep) {
      Point lo(n), hi(n);
      for (std::size_t i = 0; i < n; ++i) {
        double a = c[i] - side + 2.0 * side * unif(rng);
        double b = c[i] - side + 2.0 * side * unif(rng);
        if (a > b) std::swap(a, b);
        lo[i] = std::max(a, 1e-12);
        hi[i] = std::max(b, lo[i] + 1e-9);
      }
      // tensor Gauss-Legendre over E
      double mu = 0.0, m = 0.0;
      const std::size_t total = static_cast<std::size_t>(std::pow(gl.order(), n));
      Point x(n);
      for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        double w = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t k = rem % gl.nodes.size();
          rem /= gl.nodes.size();
          const double half = 0.5 * (hi[i] - lo[i]);
          x[i] = lo[i] + half * (1.0 + gl.nodes[k]);
          w *= half * gl.weights[k];
        }
        mu += w * mualpha_density(alpha, x);
        m += w * malpha_density(alpha, x);
      }
      const double ratio = mu / (std::exp(-dot(c, c)) * m);
      worst = std::max({worst, ratio, 1.0 / ratio});
    }
  }
  sys.measure_constant = worst;
  return sys;
}

CzReport cz_size_check(const AlphaParam& alpha, const ScalarKernel& kernel,
                       const std::vector<PairSample>& samples) {
  CzReport rep;
  rep.check_name = "size";
  rep.n = static_cast<int>(alpha.n());
  rep.alpha_hat = alpha.hat();
  for (const PairSample& s : samples) {
    const double d = distance(s.x, s.y);
    if (!(d > 0.0)) {
      ++rep.skipped;
      continue;
    }
    const double k = std::abs(kernel(s.x, s.y));
    const double v = k == 0.0 ? 0.0 : k * malpha_ball(alpha, s.x, d).exact;
    rep.constant = std::max(rep.constant, v);
    ++rep.samples;
  }
  rep.pass = std::isfinite(rep.constant);
  return rep;
}

CzReport cz_regularity_check(const AlphaParam& alpha, const ScalarKernel& kernel,
                             const std::vector<TripleSample>& samples) {
  CzReport rep;
  rep.check_name = "regularity";
  rep.n = static_cast<int>(alpha.n());
  rep.alpha_hat = alpha.hat();
  for (const TripleSample& s : samples) {
    const double dxy = distance(s.x, s.y);
    const double dxz = distance(s.x, s.z);
    if (!(dxy > 0.0) || !(dxz > 0.0) || dxz > 0.5 * dxy) {
      ++rep.skipped;
      continue;
    }
    const double diff = std::abs(kernel(s.x, s.y) - kernel(s.z, s.y));
    const double v = diff == 0.0 ? 0.0 : diff * dxy * malpha_ball(alpha, s.x, dxy).exact / dxz;
    rep.constant = std::max(rep.constant, v);
    ++rep.samples;
  }
  rep.pass = std::isfinite(rep.constant);
  return rep;
}

CzReport cz_refine(const CzReport& coarse, const CzReport& fine, double max_drift) {
  CzReport rep = fine;
  rep.samples = coarse.samples + fine.samples;
  rep.skipped = coarse.skipped + fine.skipped;
  if (coarse.constant > 0.0)
    rep.refinement_ratio = fine.constant / coarse.constant;
  else
    rep.refinement_ratio = fine.constant == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  rep.pass = coarse.pass && fine.pass && std::isfinite(rep.constant) &&
             std::abs(rep.refinement_ratio - 1.0) <= max_drift;
  return rep;
}

}  // namespace lagvar
