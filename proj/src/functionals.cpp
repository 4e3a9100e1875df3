#include "hardymu/functionals.hpp"

#include <cmath>
#include <limits>

#include "hardymu/errors.hpp"
#include "hardymu/measure.hpp"
#include "hardymu/quadrature.hpp"

namespace hardymu {

namespace {

double default_tol(int d) { return d == 1 ? 1e-10 : 1e-7; }

int sgn_of(double v) { return (v > 0.0) - (v < 0.0); }

enum class TermKind { Gradient, Value, Drift, Mass };

struct Term {
  double value = 0.0;
  double err = 0.0;
};

// One weighted integral of a radial test function against d-mu, computed at
// two refinement levels; disagreement beyond the membership tolerance (or a
// divergent integrand) fails the W^{1,p}_mu certificate.
Term weighted_term(const TestFunction& u, const ProblemParams& params, TermKind kind,
                   double weight_exp, const FunctionalOptions& opts) {
  const int d = params.d();
  const double p = params.p();
  const double rel_tol = opts.rel_tol > 0.0 ? opts.rel_tol : default_tol(d);

  if (kind == TermKind::Drift && params.zero_matrix()) return {0.0, 0.0};

  try {
    if (params.isotropic()) {
      RadialOptions ropts;
      ropts.rel_tol = rel_tol;
      std::function<double(double)> profile;
      if (u.kind() == TestFnKind::Power) {
        // Split the power part into the log-space exponent.
        const double gamma = u.power_exponent();
        const double ap = std::pow(std::abs(u.amplitude()), p);
        double coeff = ap;
        switch (kind) {
          case TermKind::Gradient:
            coeff = std::pow(std::abs(u.amplitude() * gamma), p);
            ropts.power_shift = p * (gamma - 1.0) - weight_exp;
            break;
          case TermKind::Value:
            ropts.power_shift = p * gamma - weight_exp;
            break;
          case TermKind::Drift:
            coeff = ap * std::pow(params.iso_alpha(), 0.5 * p);
            ropts.power_shift = p * gamma + p - weight_exp;
            break;
          case TermKind::Mass:
            ropts.power_shift = p * gamma;
            break;
        }
        profile = [coeff](double) { return coeff; };
      } else {
        ropts.r_min = u.support_lo();
        ropts.r_max = u.support_hi();
        const double alpha_p = params.zero_matrix()
                                   ? 0.0
                                   : std::pow(params.iso_alpha(), 0.5 * p);
        switch (kind) {
          case TermKind::Gradient:
            profile = [&u, p, weight_exp](double r) {
              return std::pow(std::abs(u.derivative(r)), p) * std::pow(r, -weight_exp);
            };
            break;
          case TermKind::Value:
            profile = [&u, p, weight_exp](double r) {
              return std::pow(std::abs(u.value(r)), p) * std::pow(r, -weight_exp);
            };
            break;
          case TermKind::Drift:
            profile = [&u, p, weight_exp, alpha_p](double r) {
              return alpha_p * std::pow(std::abs(u.value(r)), p) *
                     std::pow(r, p - weight_exp);
            };
            break;
          case TermKind::Mass:
            profile = [&u, p](double r) { return std::pow(std::abs(u.value(r)), p); };
            break;
        }
      }
      ropts.base_order = 12;
      const IntegralResult coarse = radial_integral(profile, d, params, ropts);
      ropts.base_order = 24;
      const IntegralResult fine = radial_integral(profile, d, params, ropts);
      const double v1 = params.c() * coarse.value;
      const double v2 = params.c() * fine.value;
      const double mx = std::max(std::abs(v1), std::abs(v2));
      if (mx > 0.0 && std::abs(v1 - v2) > opts.membership_tol * mx)
        throw MembershipError(
            "weighted integral failed the refinement-agreement certificate");
      return {v2, std::max(params.c() * fine.error_estimate, std::abs(v1 - v2))};
    }

    // Anisotropic path: polar decomposition, angular quadrature outside and
    // the adaptive log-radial engine per direction.  The drift weight
    // (x^T A x)^{p/2} = q(omega)^{p/2} r^p splits exactly.
    PolarOptions popts;
    popts.radial.rel_tol = rel_tol;
    if (kind == TermKind::Drift) popts.angular_power = 0.5 * p;
    std::function<double(double)> profile;
    if (u.kind() == TestFnKind::Power) {
      const double gamma = u.power_exponent();
      const double ap = std::pow(std::abs(u.amplitude()), p);
      double coeff = ap;
      switch (kind) {
        case TermKind::Gradient:
          coeff = std::pow(std::abs(u.amplitude() * gamma), p);
          popts.radial.power_shift = p * (gamma - 1.0) - weight_exp;
          break;
        case TermKind::Value:
          popts.radial.power_shift = p * gamma - weight_exp;
          break;
        case TermKind::Drift:
          popts.radial.power_shift = p * gamma + p - weight_exp;
          break;
        case TermKind::Mass:
          popts.radial.power_shift = p * gamma;
          break;
      }
      profile = [coeff](double) { return coeff; };
    } else {
      popts.radial.r_min = u.support_lo();
      popts.radial.r_max = u.support_hi();
      switch (kind) {
        case TermKind::Gradient:
          profile = [&u, p, weight_exp](double r) {
            return std::pow(std::abs(u.derivative(r)), p) * std::pow(r, -weight_exp);
          };
          break;
        case TermKind::Value:
          profile = [&u, p, weight_exp](double r) {
            return std::pow(std::abs(u.value(r)), p) * std::pow(r, -weight_exp);
          };
          break;
        case TermKind::Drift:
          profile = [&u, p, weight_exp](double r) {
            return std::pow(std::abs(u.value(r)), p) * std::pow(r, p - weight_exp);
          };
          break;
        case TermKind::Mass:
          profile = [&u, p](double r) { return std::pow(std::abs(u.value(r)), p); };
          break;
      }
    }
    popts.radial.base_order = 12;
    const IntegralResult coarse = polar_radial_integral(profile, params, popts);
    popts.radial.base_order = 24;
    const IntegralResult fine = polar_radial_integral(profile, params, popts);
    const double mx = std::max(std::abs(coarse.value), std::abs(fine.value));
    if (mx > 0.0 && std::abs(coarse.value - fine.value) > opts.membership_tol * mx)
      throw MembershipError(
          "weighted integral failed the refinement-agreement certificate");
    return {fine.value,
            std::max(fine.error_estimate, std::abs(coarse.value - fine.value))};
  } catch (const DivergenceError& e) {
    throw MembershipError(std::string("u is outside the weighted Sobolev class: ") +
                          e.what());
  } catch (const PreconditionError& e) {
    if (u.kind() == TestFnKind::Power && params.zero_matrix())
      throw MembershipError(
          "power function against A == 0 has infinite weighted mass");
    throw;
  }
}

HardyReport assemble_report(const TestFunction& u, const ProblemParams& params,
                            double grad_weight, double value_weight, double constant,
                            int sign, const FunctionalOptions& opts) {
  const double p = params.p();
  const Term grad = weighted_term(u, params, TermKind::Gradient, grad_weight, opts);
  const Term hardy = weighted_term(u, params, TermKind::Value, value_weight, opts);
  const Term drift = weighted_term(u, params, TermKind::Drift, value_weight, opts);

  HardyReport rep;
  rep.gradient_term = grad.value;
  rep.hardy_term = hardy.value;
  rep.drift_term = drift.value;
  rep.constant = constant;
  rep.sign = sign;
  const double cpow = std::pow(constant, (p - 1.0) / p);
  rep.deficit = grad.value + cpow * sign * drift.value - constant * hardy.value;
  rep.error_budget = grad.err + cpow * std::abs(sign) * drift.err + constant * hardy.err;
  return rep;
}

}  // namespace

int sgn_factor(int d, double p) { return sgn_of(static_cast<double>(d) - p); }

HardyReport hardy_deficit(const TestFunction& u, const ProblemParams& params,
                          const FunctionalOptions& opts) {
  return assemble_report(u, params, 0.0, params.p(), hardy_constant(params.d(), params.p()),
                         sgn_factor(params.d(), params.p()), opts);
}

HardyReport ckn_a_deficit(const TestFunction& u, const ProblemParams& params, double a,
                          const FunctionalOptions& opts) {
  if (!u.compact_support() || !(u.support_lo() > 0.0))
    throw MembershipError("ckn_a_deficit: test function must vanish near the origin");
  const double p = params.p();
  const double shifted = params.d() - p * (a + 1.0);
  const double constant = std::pow(std::abs(shifted) / p, p);
  return assemble_report(u, params, p * a, p * (a + 1.0), constant, sgn_of(shifted), opts);
}

HardyReport ckn_beta_deficit(const TestFunction& u, const ProblemParams& params, double beta,
                             const FunctionalOptions& opts) {
  if (!u.compact_support() || !(u.support_lo() > 0.0))
    throw MembershipError("ckn_beta_deficit: test function must vanish near the origin");
  const double p = params.p();
  const double shifted = params.d() - (p + beta);
  const double constant = std::pow(std::abs(shifted) / p, p);
  return assemble_report(u, params, beta, p + beta, constant, sgn_of(shifted), opts);
}

PoincareReport poincare_deficit_detail(const TestFunction& u, const ProblemParams& params,
                                       const FunctionalOptions& opts) {
  const double p = params.p();
  const int d = params.d();
  if (!(p > d)) throw PreconditionError("poincare_deficit: requires p > d");
  if (!params.positive_definite())
    throw PreconditionError("poincare_deficit: requires positive definite A");
  const Term grad = weighted_term(u, params, TermKind::Gradient, 0.0, opts);
  const Term mass = weighted_term(u, params, TermKind::Mass, 0.0, opts);

  PoincareReport rep;
  rep.gradient_term = grad.value;
  rep.mass_term = mass.value;
  rep.constant = std::pow((p - d) / p, p - 1.0) *
                 std::pow(params.bounds().alpha1, 0.5 * p);
  rep.value = grad.value - rep.constant * mass.value;
  rep.error_budget = grad.err + rep.constant * mass.err;
  return rep;
}

double poincare_deficit(const TestFunction& u, const ProblemParams& params,
                        const FunctionalOptions& opts) {
  return poincare_deficit_detail(u, params, opts).value;
}

std::pair<double, double> power_quotient_bounds(int d, double p, double gamma, double lambda,
                                                double alpha1, double alpha2, double norm_a) {
  const double lam_conj = lambda > 0.0 ? std::pow(lambda, (p - 1.0) / p) : 0.0;
  const double coeff = std::pow(std::abs(gamma), p) - lambda;
  const int sign = sgn_factor(d, p);

  // alpha-slot moments: moments shrink as alpha grows.
  const double sing_big = closed_form_moment(d, p, gamma - 1.0, alpha1);
  const double sing_small = closed_form_moment(d, p, gamma - 1.0, alpha2);
  const double mass_big = closed_form_moment(d, p, gamma, alpha1);
  const double mass_small = closed_form_moment(d, p, gamma, alpha2);

  // Upper bound exactly as displayed: alpha1 slots in the numerator,
  // alpha2 slot in the denominator.
  const double upper =
      (coeff * sing_big + std::pow(norm_a, 0.5 * p) * lam_conj * mass_big) / mass_small;

  // Valid lower bound: slot choice follows the signs.
  const double num_low =
      coeff * (coeff >= 0.0 ? sing_small : sing_big) +
      (sign > 0 ? lam_conj * std::pow(alpha1, 0.5 * p) * mass_small
                : (sign < 0 ? -lam_conj * std::pow(norm_a, 0.5 * p) * mass_big : 0.0));
  const double lower = num_low / (num_low >= 0.0 ? mass_big : mass_small);
  return {upper, lower};
}

std::pair<double, double> closed_form_power_functional(double gamma, double lambda,
                                                       const ProblemParams& params) {
  if (!(lambda >= 0.0))
    throw PreconditionError("closed_form_power_functional: lambda must be >= 0");
  if (!gamma_in_window(gamma, params.d(), params.p()))
    throw PreconditionError("closed_form_power_functional: gamma outside the admissible window");
  if (!params.isotropic() || !params.positive_definite())
    throw PreconditionError("closed_form_power_functional: requires A = alpha I, alpha > 0");
  const double alpha = params.iso_alpha();
  return power_quotient_bounds(params.d(), params.p(), gamma, lambda, alpha, alpha, alpha);
}

}  // namespace hardymu
