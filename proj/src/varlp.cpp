#include "lagvar/varlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lagvar/errors.hpp"
#include "lagvar/geometry.hpp"
#include "lagvar/quadrature.hpp"

namespace lagvar {

std::string to_string(Measure m) {
  switch (m) {
    case Measure::mu_alpha: return "mu_alpha";
    case Measure::m_alpha: return "m_alpha";
    case Measure::lebesgue: return "lebesgue";
  }
  return "unknown";
}

std::string to_string(ExponentKind k) {
  switch (k) {
    case ExponentKind::constant: return "constant";
    case ExponentKind::decay_power: return "decay-power";
    case ExponentKind::tabulated: return "tabulated";
    case ExponentKind::conjugate: return "conjugate";
    case ExponentKind::lifted: return "lifted";
  }
  return "unknown";
}

std::string to_string(ExponentClass c) {
  switch (c) {
    case ExponentClass::LH0: return "LH0";
    case ExponentClass::LHinf: return "LHinf";
    case ExponentClass::Pe_inf: return "Pe_inf";
  }
  return "unknown";
}

ExponentField ExponentField::constant(double p, std::size_t n) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("constant exponent must lie in [1, inf)");
  ExponentField f;
  f.eval_ = [p](std::span<const double>) { return p; };
  f.dim_ = n;
  f.p_minus_ = f.p_plus_ = f.p_infty_ = p;
  f.kind_ = ExponentKind::constant;
  f.params_ = {p};
  return f;
}

ExponentField ExponentField::decay_power(double p_infty, double A, double q, std::size_t n) {
  if (!(q > 0.0)) throw DomainError("decay-power exponent needs q > 0");
  const double at_zero = p_infty + A / std::pow(std::numbers::e, q);
  if (!(std::min(p_infty, at_zero) >= 1.0)) throw DomainError("decay-power exponent drops below 1");
  ExponentField f;
  f.eval_ = [p_infty, A, q](std::span<const double> x) {
    return p_infty + A / std::pow(std::numbers::e + norm2(x), q);
  };
  f.dim_ = n;
  // |x| ranges over (0, inf) on the orthant
  f.p_minus_ = std::min(p_infty, at_zero);
  f.p_plus_ = std::max(p_infty, at_zero);
  f.p_infty_ = p_infty;
  f.kind_ = ExponentKind::decay_power;
  f.params_ = {p_infty, A, q};
  return f;
}

ExponentField ExponentField::tabulated(std::vector<std::vector<double>> axes,
                                       std::vector<double> values, double p_infty) {
  std::size_t total = 1;
  for (const auto& ax : axes) {
    if (ax.size() < 2) throw DomainError("tabulated exponent needs at least two nodes per axis");
    if (!std::is_sorted(ax.begin(), ax.end())) throw DomainError("tabulated axis nodes must be sorted");
    total *= ax.size();
  }
  if (axes.empty() || values.size() != total) throw DimensionError("tabulated exponent: shape mismatch");
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  if (!(lo >= 1.0)) throw DomainError("tabulated exponent drops below 1");
  ExponentField f;
  f.dim_ = axes.size();
  f.p_minus_ = lo;
  f.p_plus_ = hi;
  f.p_infty_ = p_infty;
  f.kind_ = ExponentKind::tabulated;
  f.eval_ = [axes = std::move(axes), values = std::move(values), lo, hi](std::span<const double> x) {
    const std::size_t n = axes.size();
    std::vector<std::size_t> base(n);
    std::vector<double> frac(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ax = axes[i];
      const double xi = std::clamp(x[i], ax.front(), ax.back());
      std::size_t j = static_cast<std::size_t>(std::upper_bound(ax.begin(), ax.end(), xi) - ax.begin());
      j = std::clamp<std::size_t>(j, 1, ax.size() - 1) - 1;
      base[i] = j;
      frac[i] = (xi - ax[j]) / (ax[j + 1] - ax[j]);
    }
    double acc = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
      double w = 1.0;
      std::size_t flat = 0, stride = 1;
      for (std::size_t i = 0; i < n; ++i) {
        const bool up = corner & (std::size_t{1} << i);
        w *= up ? frac[i] : 1.0 - frac[i];
        flat += (base[i] + (up ? 1 : 0)) * stride;
        stride *= axes[i].size();
      }
      if (w != 0.0) acc += w * values[flat];
    }
    return std::clamp(acc, lo, hi);
  };
  return f;
}

ExponentField conjugate(const ExponentField& p) {
  if (!(p.p_minus() > 1.0)) throw DomainError("conjugate exponent unbounded: p_minus must exceed 1");
  auto conj = [](double v) { return v / (v - 1.0); };
  ExponentField f;
  auto base = p.eval_;
  f.eval_ = [base, conj](std::span<const double> x) { return conj(base(x)); };
  f.dim_ = p.dim_;
  f.p_plus_ = conj(p.p_minus());
  f.p_minus_ = conj(p.p_plus());
  f.p_infty_ = p.p_infty() > 1.0 ? conj(p.p_infty()) : std::numeric_limits<double>::infinity();
  f.kind_ = ExponentKind::conjugate;
  return f;
}

ExponentField lift_exponent_radial(const ExponentField& p, const std::vector<int>& k) {
  if (k.size() != p.dim()) throw DimensionError("lift_exponent_radial: block count mismatch");
  std::size_t total = 0;
  for (int ki : k) {
    if (ki < 1) throw DomainError("lift_exponent_radial: block dimensions must be >= 1");
    total += static_cast<std::size_t>(ki);
  }
  ExponentField f;
  auto base = p.eval_;
  f.eval_ = [base, k](std::span<const double> xbar) {
    Point r(k.size());
    std::size_t off = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      r[i] = norm2(xbar.subspan(off, static_cast<std::size_t>(k[i])));
      off += static_cast<std::size_t>(k[i]);
    }
    return base(r);
  };
  f.dim_ = total;
  f.p_minus_ = p.p_minus();
  f.p_plus_ = p.p_plus();
  f.p_infty_ = p.p_infty();
  f.kind_ = ExponentKind::lifted;
  f.params_ = p.params_;
  return f;
}

std::size_t TensorGrid::size() const {
  std::size_t s = 1;
  for (const auto& ax : nodes) s *= ax.size();
  return s;
}

Point TensorGrid::point(std::size_t flat) const {
  Point p(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    p[i] = nodes[i][flat % nodes[i].size()];
    flat /= nodes[i].size();
  }
  return p;
}

double TensorGrid::weight(std::size_t flat) const {
  double w = 1.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    w *= weights[i][flat % weights[i].size()];
    flat /= weights[i].size();
  }
  return w;
}

TensorGrid mu_grid_laguerre(const AlphaParam& alpha, int order) {
  TensorGrid g;
  g.measure = Measure::mu_alpha;
  for (std::size_t i = 0; i < alpha.n(); ++i) {
    const QuadratureRule r = gauss_laguerre(order, alpha[i]);
    const double norm = std::exp(-alpha.log_normalizer(i));
    std::vector<double> xs, ws;
    for (std::size_t j = 0; j < r.nodes.size(); ++j) {
      xs.push_back(std::sqrt(r.nodes[j]));
      ws.push_back(r.weights[j] * norm);
    }
    g.nodes.push_back(std::move(xs));
    g.weights.push_back(std::move(ws));
  }
  return g;
}

TensorGrid panel_grid(const AlphaParam& alpha, Measure measure, double bound, int panels,
                      int order) {
  if (!(bound > 0.0) || panels < 1) throw DomainError("panel_grid: bad bound or panel count");
  TensorGrid g;
  g.measure = measure;
  const QuadratureRule r = gauss_legendre(order);
  for (std::size_t i = 0; i < alpha.n(); ++i) {
    std::vector<double> xs, ws;
    const double h = bound / panels;
    for (int p = 0; p < panels; ++p) {
      for (std::size_t j = 0; j < r.nodes.size(); ++j) {
        const double x = h * (p + 0.5 * (1.0 + r.nodes[j]));
        double w = 0.5 * h * r.weights[j];
        switch (measure) {
          case Measure::mu_alpha:
            w *= 2.0 * std::exp((2.0 * alpha[i] + 1.0) * std::log(x) - x * x - alpha.log_normalizer(i));
            break;
          case Measure::m_alpha: w *= std::pow(x, 2.0 * alpha[i] + 1.0); break;
          case Measure::lebesgue: break;
        }
        xs.push_back(x);
        ws.push_back(w);
      }
    }
    g.nodes.push_back(std::move(xs));
    g.weights.push_back(std::move(ws));
  }
  return g;
}

DiscreteFunction DiscreteFunction::sample(const TensorGrid& grid,
                                          const std::function<double(const Point&)>& f) {
  DiscreteFunction d;
  d.grid = grid;
  d.values.resize(grid.size());
  for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] = f(grid.point(k));
  return d;
}

bool DiscreteFunction::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

namespace {

void check_dims(const DiscreteFunction& f, const ExponentField& p) {
  if (f.values.size() != f.grid.size()) throw DimensionError("discrete function: shape mismatch");
  if (f.grid.dim() != p.dim()) throw DimensionError("exponent and grid dimensions differ");
}

}  // namespace

double modular_scaled(const DiscreteFunction& f, const ExponentField& p, double lambda) {
  check_dims(f, p);
  std::vector<double> terms(f.values.size(), 0.0);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double v = std::abs(f.values[k]) / lambda;
    if (v == 0.0) continue;
    const double w = f.grid.weight(k);
    if (w == 0.0) continue;
    terms[k] = std::exp(p(f.grid.point(k)) * std::log(v) + std::log(w));
  }
  const double s = pairwise_sum(terms);
  return std::isnan(s) ? std::numeric_limits<double>::infinity() : s;
}

double modular(const DiscreteFunction& f, const ExponentField& p) { return modular_scaled(f, p, 1.0); }

NormResult luxemburg_norm(const DiscreteFunction& f, const ExponentField& p) {
  check_dims(f, p);
  NormResult res;
  if (f.is_zero()) return res;
  double lo = std::log(1e-30), hi = std::log(1e30);
  const double rho_hi = modular_scaled(f, p, std::exp(hi));
  const double rho_lo = modular_scaled(f, p, std::exp(lo));
  if (!std::isfinite(rho_hi)) throw AccuracyError("luxemburg_norm: modular is not finite at any probed scale");
  if (rho_hi > 1.0) throw AccuracyError("luxemburg_norm: norm exceeds the search bracket");
  if (rho_lo <= 1.0) {
    res.norm = std::exp(lo);
    res.modular_at_norm = rho_lo;
    return res;
  }
  // invariant: rho(exp(lo)) > 1 >= rho(exp(hi))
  int it = 0;
  for (; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (modular_scaled(f, p, std::exp(mid)) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  if (hi - lo > 1e-12) throw AccuracyError("luxemburg_norm: bisection did not converge");
  res.norm = std::exp(hi);
  res.modular_at_norm = modular_scaled(f, p, res.norm);
  res.iterations = it;
  return res;
}

double classical_norm(const DiscreteFunction& f, double p) {
  std::vector<double> terms(f.values.size());
  for (std::size_t k = 0; k < terms.size(); ++k)
    terms[k] = f.grid.weight(k) * std::pow(std::abs(f.values[k]), p);
  return std::pow(pairwise_sum(terms), 1.0 / p);
}

HolderReport holder_check(const DiscreteFunction& f, const DiscreteFunction& g,
                          const ExponentField& p) {
  if (f.values.size() != g.values.size()) throw DimensionError("holder_check: grids differ");
  HolderReport rep;
  std::vector<double> terms(f.values.size());
  for (std::size_t k = 0; k < terms.size(); ++k)
    terms[k] = f.grid.weight(k) * std::abs(f.values[k] * g.values[k]);
  rep.lhs = pairwise_sum(terms);
  if (rep.lhs == 0.0) return rep;
  rep.bound = 2.0 * luxemburg_norm(f, p).norm * luxemburg_norm(g, conjugate(p)).norm;
  rep.ratio = rep.lhs / rep.bound;
  rep.pass = rep.ratio <= 1.0;
  return rep;
}

ClassConstant class_constants(const ExponentField& p, ExponentClass which,
                              const std::vector<Point>& probes) {
  ClassConstant c;
  switch (which) {
    case ExponentClass::LH0:
      for (std::size_t i = 0; i < probes.size(); ++i) {
        const double pi = p(probes[i]);
        for (std::size_t j = i + 1; j < probes.size(); ++j) {
          const double d = distance(probes[i], probes[j]);
          if (!(d > 0.0) || d >= 0.5) continue;
          c.constant = std::max(c.constant, std::abs(pi - p(probes[j])) * -std::log(d));
          ++c.probes_used;
        }
      }
      break;
    case ExponentClass::LHinf:
      for (const Point& x : probes) {
        c.constant = std::max(c.constant, std::abs(p(x) - p.p_infty()) * std::log(std::numbers::e + norm2(x)));
        ++c.probes_used;
      }
      break;
    case ExponentClass::Pe_inf:
      for (const Point& x : probes) {
        const double r = norm2(x);
        c.constant = std::max(c.constant, std::abs(p(x) - p.p_infty()) * r * r);
        ++c.probes_used;
      }
      break;
  }
  c.pass = std::isfinite(c.constant);
  return c;
}

}  // namespace lagvar
