#include "hardymu/optimality.hpp"

#include <cmath>
#include <ostream>

#include "hardymu/errors.hpp"
#include "hardymu/functionals.hpp"
#include "hardymu/measure.hpp"
#include "hardymu/quadrature.hpp"
#include "hardymu/report.hpp"

namespace hardymu {

namespace {

double window_width(int d, double p) {
  return gamma_window_hi(d, p) - gamma_window_lo(d, p);
}

}  // namespace

QuotientPoint shifted_quotient_detail(double gamma, double lambda,
                                      const ProblemParams& params,
                                      const SweepOptions& opts) {
  const int d = params.d();
  const double p = params.p();
  if (!(lambda >= 0.0))
    throw PreconditionError("shifted_quotient: lambda must be >= 0");
  if (!gamma_in_window(gamma, d, p))
    throw PreconditionError("shifted_quotient: gamma outside the admissible window");

  QuotientPoint pt;
  pt.gamma = gamma;
  pt.offset = gamma - gamma_window_lo(d, p);
  const double lam_conj = lambda > 0.0 ? std::pow(lambda, (p - 1.0) / p) : 0.0;
  const int sign = sgn_factor(d, p);
  const double gp = std::pow(std::abs(gamma), p);

  if (params.isotropic() && params.positive_definite()) {
    const double alpha = params.iso_alpha();
    const double alpha_p = std::pow(alpha, 0.5 * p);
    // Two radial moments carry the whole quotient: the singular one at
    // exponent p(gamma-1) and the mass one at exponent p gamma.
    RadialOptions ropts;
    ropts.rel_tol = opts.rel_tol;
    const auto one = [](double) { return 1.0; };
    ropts.power_shift = p * (gamma - 1.0);
    const IntegralResult sing = radial_integral(one, d, params, ropts);
    ropts.power_shift = p * gamma;
    const IntegralResult mass = radial_integral(one, d, params, ropts);

    const double c = params.c();
    pt.grad_term = gp * sing.value * c;
    pt.hardy_term = sing.value * c;
    pt.drift_term = alpha_p * mass.value * c;
    pt.denom = mass.value * c;
    const double numer = (gp - lambda) * sing.value * c + sign * lam_conj * pt.drift_term;
    pt.quotient = numer / pt.denom;
    const double err_num = (std::abs(gp - lambda) + lambda) * sing.error_estimate * c +
                           lam_conj * alpha_p * mass.error_estimate * c;
    pt.err_budget = err_num / pt.denom +
                    std::abs(numer) / (pt.denom * pt.denom) * mass.error_estimate * c;
    pt.ok = sing.converged && mass.converged;
    if (!pt.ok) pt.note = "quadrature did not converge";
    const auto bounds = power_quotient_bounds(d, p, gamma, lambda, alpha, alpha, alpha);
    pt.bound_upper = bounds.first;
    pt.bound_lower = bounds.second;
    return pt;
  }

  if (!params.positive_definite())
    throw PreconditionError("shifted_quotient: A must be positive definite");
  if (d > 3)
    throw PreconditionError("shifted_quotient: anisotropic sweeps support d <= 3 only");

  // Anisotropic full quadrature: polar decomposition with the power part of
  // phi = |x|^gamma kept in the radial exponent.
  const auto one = [](double) { return 1.0; };
  PolarOptions popts;
  popts.radial.rel_tol = opts.rel_tol;
  popts.radial.power_shift = p * (gamma - 1.0);
  const IntegralResult sing = polar_radial_integral(one, params, popts);
  popts.radial.power_shift = p * gamma;
  const IntegralResult mass = polar_radial_integral(one, params, popts);
  popts.angular_power = 0.5 * p;
  const IntegralResult drift = polar_radial_integral(one, params, popts);
  IntegralResult grad = sing;
  grad.value *= gp;
  grad.error_estimate *= gp;
  IntegralResult hardy = sing;

  pt.grad_term = grad.value;
  pt.hardy_term = hardy.value;
  pt.drift_term = drift.value;
  pt.denom = mass.value;
  const double numer = grad.value + sign * lam_conj * drift.value - lambda * hardy.value;
  pt.quotient = numer / mass.value;
  const double err_num = grad.error_estimate + lam_conj * drift.error_estimate +
                         lambda * hardy.error_estimate;
  pt.err_budget = err_num / mass.value +
                  std::abs(numer) / (mass.value * mass.value) * mass.error_estimate;
  pt.ok = grad.converged && hardy.converged && drift.converged && mass.converged;
  if (!pt.ok) pt.note = "full quadrature did not converge";
  const auto& b = params.bounds();
  const auto bounds =
      power_quotient_bounds(d, p, gamma, lambda, b.alpha1, b.alpha2, b.alpha2);
  pt.bound_upper = bounds.first;
  pt.bound_lower = bounds.second;
  return pt;
}

double shifted_quotient(double gamma, double lambda, const ProblemParams& params,
                        const SweepOptions& opts) {
  return shifted_quotient_detail(gamma, lambda, params, opts).quotient;
}

SweepResult optimality_sweep(double lambda, const ProblemParams& params, int n_points,
                             double big_m, const SweepOptions& opts) {
  if (n_points < 5) throw PreconditionError("optimality_sweep: need n_points >= 5");
  if (!(lambda >= 0.0)) throw PreconditionError("optimality_sweep: lambda must be >= 0");
  if (!(big_m > 0.0)) throw PreconditionError("optimality_sweep: M must be > 0");
  const int d = params.d();
  const double p = params.p();
  const double lo = gamma_window_lo(d, p);
  const double width = window_width(d, p);

  SweepResult res;
  res.lambda = lambda;
  for (int k = 1; k <= n_points; ++k) {
    const double offset = width * std::pow(0.5, k);
    if (offset < opts.offset_floor) {
      res.breakdown_note = "offset floor reached before the grid was exhausted";
      break;
    }
    const double gamma = lo + offset;
    QuotientPoint pt;
    try {
      pt = shifted_quotient_detail(gamma, lambda, params, opts);
    } catch (const Error& e) {
      pt.gamma = gamma;
      pt.offset = offset;
      pt.ok = false;
      pt.note = e.what();
    }
    if (pt.ok) {
      res.gamma_values.push_back(pt.gamma);
      res.quotients.push_back(pt.quotient);
      if (pt.quotient < -big_m && !res.crossing_gamma) {
        res.diverged = true;
        res.crossing_gamma = pt.gamma;
      }
    } else {
      ++res.n_failed;
    }
    res.points.push_back(std::move(pt));
  }
  return res;
}

Witness find_violating_function(double lambda, double big_m, const ProblemParams& params,
                                const SweepOptions& opts) {
  const int d = params.d();
  const double p = params.p();
  if (!(lambda > hardy_constant(d, p)))
    throw PreconditionError(
        "find_violating_function: no witness exists for lambda <= C(d,p)");
  if (!(big_m > 0.0)) throw PreconditionError("find_violating_function: M must be > 0");

  const double lo = gamma_window_lo(d, p);
  const double width = window_width(d, p);
  Witness w;
  std::string last_note;
  for (int k = 1; k <= 80; ++k) {
    const double offset = width * std::pow(0.5, k);
    if (offset < opts.offset_floor) break;
    const double gamma = lo + offset;
    QuotientPoint pt;
    try {
      pt = shifted_quotient_detail(gamma, lambda, params, opts);
    } catch (const Error& e) {
      last_note = e.what();
      continue;
    }
    if (!pt.ok) {
      last_note = pt.note;
      continue;
    }
    if (pt.quotient < -big_m) {
      w.fn = TestFunction::power(gamma);
      w.point = pt;
      return w;
    }
    w.point = pt;  // keep the deepest evaluated point for diagnostics
  }
  w.note = "no quotient below -M before the offset floor";
  if (!last_note.empty()) w.note += "; last quadrature note: " + last_note;
  return w;
}

double threshold_bisection(const ProblemParams& params, double lambda_lo, double lambda_hi,
                           double big_m, double min_offset, int iterations,
                           const SweepOptions& opts) {
  if (!(lambda_lo < lambda_hi))
    throw PreconditionError("threshold_bisection: need lambda_lo < lambda_hi");
  const double width = window_width(params.d(), params.p());
  const int n_points =
      std::max(5, static_cast<int>(std::ceil(std::log2(width / min_offset))));
  auto diverged = [&](double lam) {
    return optimality_sweep(lam, params, n_points, big_m, opts).diverged;
  };
  if (diverged(lambda_lo))
    throw PreconditionError("threshold_bisection: predicate already true at lambda_lo");
  if (!diverged(lambda_hi))
    throw PreconditionError("threshold_bisection: predicate still false at lambda_hi");
  double lo = lambda_lo, hi = lambda_hi;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    (diverged(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << "gamma,quotient,grad_term,drift_term,hardy_term,denom,err_budget\n";
  for (const auto& pt : result.points) {
    if (!pt.ok) continue;
    out << format_double(pt.gamma) << ',' << format_double(pt.quotient) << ','
        << format_double(pt.grad_term) << ',' << format_double(pt.drift_term) << ','
        << format_double(pt.hardy_term) << ',' << format_double(pt.denom) << ','
        << format_double(pt.err_budget) << '\n';
  }
}

}  // namespace hardymu
