#include "hardymu/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "hardymu/errors.hpp"
#include "hardymu/measure.hpp"

namespace hardymu {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTailExponent = 40.0;  // weight cut where it reaches e^{-40}

// Nodes/weights of the n-point Gauss-Legendre rule on [-1,1], cached.
const std::pair<std::vector<double>, std::vector<double>>& gl_table(int n) {
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> x(n), w(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n, standard cosine initial guess.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  auto [pos, inserted] = cache.emplace(n, std::make_pair(std::move(x), std::move(w)));
  (void)inserted;
  return pos->second;
}

// One adaptive panel on the mapped (log) axis.
struct Panel {
  double a = 0.0, b = 0.0;
  double value = 0.0;  // fine estimate
  double err = 0.0;    // |fine - coarse|
  double l1 = 0.0;     // sum of |contributions| at the fine level
};

struct PanelWorse {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.err != rhs.err) return lhs.err < rhs.err;
    return lhs.a > rhs.a;  // deterministic tie-break
  }
};

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 2) throw PreconditionError("gauss_legendre: order must be >= 2");
  const auto& [x, w] = gl_table(n);
  QuadratureRule rule;
  rule.nodes = x;
  rule.weights = w;
  rule.transform = "gauss-legendre";
  return rule;
}

QuadratureRule log_graded_rule(double r_max, int panels, int order) {
  if (!(r_max > 0.0)) throw PreconditionError("log_graded_rule: r_max must be > 0");
  if (panels < 1 || order < 2) throw PreconditionError("log_graded_rule: bad panel/order");
  const auto& [gx, gw] = gl_table(order);
  const double t_hi = std::log(r_max);
  // Panel widths double leftwards up to a cap, keeping the mapped nodes
  // inside the representable range.
  std::vector<double> edges{t_hi};
  double width = 1.0;
  for (int k = 0; k < panels; ++k) {
    const double next = edges.back() - width;
    if (std::exp(next) == 0.0) break;
    edges.push_back(next);
    width = std::min(2.0 * width, 8.0);
  }
  QuadratureRule rule;
  rule.transform = "log-graded";
  for (std::size_t k = edges.size() - 1; k >= 1; --k) {
    const double a = edges[k], b = edges[k - 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      const double t = mid + half * gx[i];
      const double r = std::exp(t);
      rule.nodes.push_back(r);
      rule.weights.push_back(half * gw[i] * r);  // dr = e^t dt
    }
  }
  return rule;
}

double apply_rule(const QuadratureRule& rule, const std::function<double(double)>& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(rule.nodes[i]);
  return sum;
}

double tail_radius(double p, double alpha) {
  if (!(alpha > 0.0)) throw PreconditionError("tail_radius: alpha must be > 0");
  return std::pow(kTailExponent * p, 1.0 / p) / std::sqrt(alpha);
}

namespace {

// Integrand on the log axis: F(t) = profile(e^t) * e^{dpow t} * weight(e^t),
// with the power factor kept in the exponent.
class MappedIntegrand {
 public:
  MappedIntegrand(const std::function<double(double)>& profile, double dpow,
                  double alpha, double p)
      : profile_(profile), dpow_(dpow), p_(p),
        alpha_pow_(alpha > 0.0 ? std::pow(alpha, 0.5 * p) : 0.0) {}

  double operator()(double t) const {
    const double r = std::exp(t);
    double log_factor = dpow_ * t;
    if (alpha_pow_ > 0.0) log_factor -= alpha_pow_ * std::exp(p_ * t) / p_;
    return profile_(r) * std::exp(log_factor);
  }

 private:
  const std::function<double(double)>& profile_;
  double dpow_, p_, alpha_pow_;
};

template <typename F>
Panel eval_panel(const F& f, double a, double b, int order, long& evals) {
  Panel pan;
  pan.a = a;
  pan.b = b;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const auto& [fx, fw] = gl_table(order);
  const auto& [cx, cw] = gl_table(std::max(2, order / 2));
  double fine = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) {
    const double v = f(mid + half * fx[i]);
    fine += fw[i] * v;
    l1 += fw[i] * std::abs(v);
  }
  double coarse = 0.0;
  for (std::size_t i = 0; i < cx.size(); ++i) coarse += cw[i] * f(mid + half * cx[i]);
  evals += static_cast<long>(fx.size() + cx.size());
  pan.value = half * fine;
  pan.l1 = half * l1;
  pan.err = std::abs(half * (fine - coarse));
  return pan;
}

}  // namespace

namespace {

struct CoreResult {
  double value = 0.0;  // bare radial integral, no angular factor
  double err = 0.0;
  double l1 = 0.0;
  long evals = 0;
  double r_hi = 0.0;
  bool converged = false;
};

// Bare adaptive radial engine shared by the isotropic entry point and the
// per-direction integrals of the polar decomposition.
CoreResult radial_core(const std::function<double(double)>& profile, int d, double p,
                       double alpha, const RadialOptions& opts) {
  double r_hi = opts.r_max;
  if (r_hi <= 0.0) {
    if (!(alpha > 0.0))
      throw PreconditionError("radial_integral: A == 0 requires an explicit r_max");
    r_hi = tail_radius(p, alpha);
  }
  const double r_lo = opts.r_min;
  if (r_lo < 0.0 || r_lo >= r_hi)
    throw PreconditionError("radial_integral: need 0 <= r_min < r_max");

  const MappedIntegrand F(profile, d + opts.power_shift, alpha, p);
  const int order = std::max(4, opts.base_order);
  const double t_hi = std::log(r_hi);

  long evals = 0;
  std::vector<Panel> panels;
  double total = 0.0, total_err = 0.0, total_l1 = 0.0;
  auto push = [&](Panel pan) {
    if (!std::isfinite(pan.value) || !std::isfinite(pan.err))
      throw DivergenceError("radial_integral: non-finite integrand (divergent near r = 0?)");
    total += pan.value;
    total_err += pan.err;
    total_l1 += pan.l1;
    panels.push_back(std::move(pan));
  };

  if (r_lo > 0.0) {
    const double t_lo = std::log(r_lo);
    const int n0 = std::clamp(static_cast<int>(std::ceil(t_hi - t_lo)), 4, 64);
    for (int k = 0; k < n0; ++k) {
      const double a = t_lo + (t_hi - t_lo) * k / n0;
      const double b = t_lo + (t_hi - t_lo) * (k + 1) / n0;
      push(eval_panel(F, a, b, order, evals));
    }
  } else {
    // Base panels around the bulk of the weight, then extension toward
    // r = 0 with doubling widths until the contributions are negligible.
    double a = t_hi - 8.0;
    for (int k = 0; k < 8; ++k) push(eval_panel(F, a + k, a + k + 1.0, order, evals));
    double width = 1.0;
    int quiet = 0;
    bool settled = false;
    const int kMaxExtend = 64;
    for (int k = 0; k < kMaxExtend; ++k) {
      Panel pan = eval_panel(F, a - width, a, order, evals);
      a -= width;
      width *= 2.0;
      const double before = std::abs(pan.value);
      push(std::move(pan));
      const double scale =
          std::max(std::abs(total), 1e-3 * total_l1) + std::numeric_limits<double>::min();
      if (before <= opts.rel_tol / 16.0 * scale)
        ++quiet;
      else
        quiet = 0;
      if (quiet >= 2) {
        settled = true;
        break;
      }
    }
    if (!settled)
      throw DivergenceError(
          "radial_integral: no decay toward r = 0 detected, integral looks divergent");
  }

  // Error-driven bisection of the worst panels.
  std::priority_queue<Panel, std::vector<Panel>, PanelWorse> queue(PanelWorse{},
                                                                   std::move(panels));
  auto target = [&] {
    return opts.rel_tol * std::max(std::abs(total), 1e-3 * total_l1) +
           std::numeric_limits<double>::min();
  };
  while (total_err > target() && static_cast<int>(queue.size()) < opts.max_panels) {
    Panel worst = queue.top();
    queue.pop();
    total -= worst.value;
    total_err -= worst.err;
    total_l1 -= worst.l1;
    const double mid = 0.5 * (worst.a + worst.b);
    for (const auto& [a, b] : {std::pair{worst.a, mid}, std::pair{mid, worst.b}}) {
      Panel half = eval_panel(F, a, b, order, evals);
      if (!std::isfinite(half.value) || !std::isfinite(half.err))
        throw DivergenceError("radial_integral: non-finite integrand during refinement");
      total += half.value;
      total_err += half.err;
      total_l1 += half.l1;
      queue.push(std::move(half));
    }
  }

  // Deterministic final summation, left to right.
  std::vector<Panel> final_panels;
  final_panels.reserve(queue.size());
  while (!queue.empty()) {
    final_panels.push_back(queue.top());
    queue.pop();
  }
  std::sort(final_panels.begin(), final_panels.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  CoreResult core;
  for (const auto& pan : final_panels) {
    core.value += pan.value;
    core.err += pan.err;
    core.l1 += pan.l1;
  }
  core.evals = evals;
  core.r_hi = r_hi;
  core.converged =
      core.err <= opts.rel_tol * std::max(std::abs(core.value), 1e-3 * core.l1) +
                      std::numeric_limits<double>::min();
  return core;
}

}  // namespace

IntegralResult radial_integral(const std::function<double(double)>& profile, int d,
                               const ProblemParams& params, const RadialOptions& opts) {
  if (d < 1) throw PreconditionError("radial_integral: d must be >= 1");
  if (!params.isotropic())
    throw PreconditionError("radial_integral: anisotropic A, use full_integral instead");
  const CoreResult core = radial_core(profile, d, params.p(), params.iso_alpha(), opts);
  IntegralResult res;
  const double ang = angular_factor(d);
  res.value = ang * core.value;
  res.error_estimate = ang * core.err;
  res.nodes_used = core.evals;
  res.r_max = core.r_hi;
  res.converged = core.converged;
  return res;
}

IntegralResult polar_radial_integral(const std::function<double(double)>& profile,
                                     const ProblemParams& params, const PolarOptions& opts) {
  const int d = params.d();
  if (d != 2 && d != 3)
    throw PreconditionError("polar_radial_integral: supports d = 2 and d = 3");
  if (!params.positive_definite())
    throw PreconditionError("polar_radial_integral: A must be positive definite");
  const double p = params.p();
  const Eigen::MatrixXd& A = params.A();
  const double s = opts.angular_power;

  // One direction: q(omega)^s * bare radial integral with alpha = q(omega).
  long evals = 0;
  double r_hi = 0.0;
  bool radial_ok = true;
  struct Dir {
    double value, err;
  };
  auto direction = [&](const Eigen::VectorXd& omega) -> Dir {
    const double q = omega.dot(A * omega);
    const CoreResult core = radial_core(profile, d, p, q, opts.radial);
    evals += core.evals;
    r_hi = std::max(r_hi, core.r_hi);
    radial_ok = radial_ok && core.converged;
    const double factor = s == 0.0 ? 1.0 : std::pow(q, s);
    return {factor * core.value, factor * core.err};
  };

  double prev = 0.0;
  double value = 0.0;
  double radial_err = 0.0;
  double angular_err = std::numeric_limits<double>::infinity();
  const double target = opts.radial.rel_tol;
  if (d == 2) {
    for (int n = 32; n <= 512; n *= 2) {
      double sum = 0.0, esum = 0.0;
      Eigen::VectorXd omega(2);
      for (int j = 0; j < n; ++j) {
        const double th = 2.0 * kPi * j / n;
        omega << std::cos(th), std::sin(th);
        const Dir dir = direction(omega);
        sum += dir.value;
        esum += dir.err;
      }
      value = sum * 2.0 * kPi / n;
      radial_err = esum * 2.0 * kPi / n;
      if (n > 32) {
        angular_err = std::abs(value - prev);
        if (angular_err <= 0.25 * target * std::abs(value)) break;
      }
      prev = value;
    }
  } else {
    for (int n = 8; n <= 64; n *= 2) {
      const auto& [gt, gw] = gl_table(n);
      const int m = 2 * n;
      double sum = 0.0, esum = 0.0;
      Eigen::VectorXd omega(3);
      for (int i = 0; i < n; ++i) {
        const double ct = gt[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        double ring = 0.0, ring_err = 0.0;
        for (int j = 0; j < m; ++j) {
          const double th = 2.0 * kPi * j / m;
          omega << st * std::cos(th), st * std::sin(th), ct;
          const Dir dir = direction(omega);
          ring += dir.value;
          ring_err += dir.err;
        }
        sum += gw[i] * ring * 2.0 * kPi / m;
        esum += gw[i] * ring_err * 2.0 * kPi / m;
      }
      value = sum;
      radial_err = esum;
      if (n > 8) {
        angular_err = std::abs(value - prev);
        if (angular_err <= 0.25 * target * std::abs(value)) break;
      }
      prev = value;
    }
  }

  IntegralResult res;
  res.value = params.c() * value;
  res.error_estimate = params.c() * (angular_err + radial_err);
  res.nodes_used = evals;
  res.r_max = r_hi;
  res.converged = radial_ok && res.error_estimate <=
                                   target * std::abs(res.value) +
                                       std::numeric_limits<double>::min();
  return res;
}

namespace {

struct BoxDefaults {
  int uniform, dyadic, order;
};

BoxDefaults box_defaults(int d, bool refined) {
  switch (d) {
    case 1:
      return refined ? BoxDefaults{48, 54, 16} : BoxDefaults{32, 48, 12};
    case 2:
      return refined ? BoxDefaults{30, 40, 14} : BoxDefaults{20, 36, 10};
    default:
      return refined ? BoxDefaults{12, 16, 8} : BoxDefaults{8, 12, 6};
  }
}

// Positive-axis breakpoints: uniform grid joined with dyadic refinement
// toward 0.  Returned increasing, first entry is the center-cell bound.
std::vector<double> axis_breaks(double R, int uniform, int dyadic) {
  std::vector<double> pts;
  for (int j = dyadic; j >= 1; --j) pts.push_back(R * std::pow(0.5, j));
  for (int k = 1; k <= uniform; ++k) pts.push_back(R * k / uniform);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct BoxPass {
  double value = 0.0;
  double l1 = 0.0;
  long evals = 0;
};

BoxPass box_pass(const std::function<double(const Eigen::VectorXd&)>& f,
                 const ProblemParams& params, double R, const BoxDefaults& def,
                 double support_lo, double support_hi) {
  const int d = params.d();
  const auto& [gx, gw] = gl_table(def.order);
  const int n = def.order;

  const std::vector<double> pos = axis_breaks(R, def.uniform, def.dyadic);
  // Full axis interval list.  d = 1 integrates over ]0, R] only.
  std::vector<std::pair<double, double>> cells1d;
  if (d == 1) {
    cells1d.emplace_back(0.0, pos.front());
    for (std::size_t i = 0; i + 1 < pos.size(); ++i)
      cells1d.emplace_back(pos[i], pos[i + 1]);
  } else {
    for (std::size_t i = pos.size(); i-- > 1;) cells1d.emplace_back(-pos[i], -pos[i - 1]);
    cells1d.emplace_back(-pos.front(), pos.front());
    for (std::size_t i = 0; i + 1 < pos.size(); ++i)
      cells1d.emplace_back(pos[i], pos[i + 1]);
  }
  const int nc = static_cast<int>(cells1d.size());

  const bool use_support = support_hi > 0.0;
  auto axis_min_abs = [](double a, double b) {
    if (a <= 0.0 && b >= 0.0) return 0.0;
    return std::min(std::abs(a), std::abs(b));
  };
  auto axis_max_abs = [](double a, double b) { return std::max(std::abs(a), std::abs(b)); };

  BoxPass pass;
  Eigen::VectorXd x(d);
  std::array<int, 3> idx{0, 0, 0};
  const int count = [&] {
    int c = 1;
    for (int k = 0; k < d; ++k) c *= nc;
    return c;
  }();

  for (int flat = 0; flat < count; ++flat) {
    int rem = flat;
    for (int k = 0; k < d; ++k) {
      idx[k] = rem % nc;
      rem /= nc;
    }
    if (use_support) {
      double lo2 = 0.0, hi2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const auto& [a, b] = cells1d[idx[k]];
        const double mn = axis_min_abs(a, b), mx = axis_max_abs(a, b);
        lo2 += mn * mn;
        hi2 += mx * mx;
      }
      if (lo2 > support_hi * support_hi || hi2 < support_lo * support_lo) continue;
    }
    // Tensor Gauss-Legendre over the cell.
    double mid[3], half[3];
    for (int k = 0; k < d; ++k) {
      const auto& [a, b] = cells1d[idx[k]];
      mid[k] = 0.5 * (a + b);
      half[k] = 0.5 * (b - a);
    }
    int pts = 1;
    for (int k = 0; k < d; ++k) pts *= n;
    for (int q = 0; q < pts; ++q) {
      int qr = q;
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        const int i = qr % n;
        qr /= n;
        x(k) = mid[k] + half[k] * gx[i];
        w *= half[k] * gw[i];
      }
      const double v = f(x) * eval_density(params, x);
      pass.value += w * v;
      pass.l1 += std::abs(w * v);
    }
    pass.evals += pts;
  }
  return pass;
}

}  // namespace

IntegralResult full_integral(const std::function<double(const Eigen::VectorXd&)>& integrand,
                             const ProblemParams& params, const BoxOptions& opts) {
  const int d = params.d();
  if (d > 3) throw PreconditionError("full_integral: only d <= 3 is supported");

  double R = opts.r_max;
  if (R <= 0.0) {
    if (!params.positive_definite())
      throw PreconditionError("full_integral: A not positive definite, supply r_max");
    R = tail_radius(params.p(), params.bounds().alpha1);
  }
  double rel_tol = opts.rel_tol;
  if (rel_tol <= 0.0) rel_tol = (d == 1) ? 1e-10 : 1e-7;

  BoxDefaults coarse = box_defaults(d, false);
  BoxDefaults fine = box_defaults(d, true);
  if (opts.uniform_per_half > 0) {
    coarse.uniform = opts.uniform_per_half;
    fine.uniform = opts.uniform_per_half + opts.uniform_per_half / 2;
  }
  if (opts.dyadic_levels > 0) {
    coarse.dyadic = opts.dyadic_levels;
    fine.dyadic = opts.dyadic_levels + 4;
  }
  if (opts.order > 0) {
    coarse.order = opts.order;
    fine.order = opts.order + 4;
  }

  const BoxPass p1 = box_pass(integrand, params, R, coarse, opts.support_lo, opts.support_hi);
  const BoxPass p2 = box_pass(integrand, params, R, fine, opts.support_lo, opts.support_hi);

  IntegralResult res;
  res.value = p2.value;
  res.error_estimate = std::abs(p2.value - p1.value);
  res.nodes_used = p1.evals + p2.evals;
  res.r_max = R;
  res.converged = res.error_estimate <=
                  rel_tol * std::max(std::abs(res.value), 1e-3 * p2.l1) +
                      std::numeric_limits<double>::min();
  return res;
}

}  // namespace hardymu
