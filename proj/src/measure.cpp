#include "hardymu/measure.hpp"

#include <cmath>

#include "hardymu/errors.hpp"
#include "hardymu/quadrature.hpp"
#include "hardymu/special.hpp"

namespace hardymu {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double sphere_surface(int d) {
  if (d < 2)
    throw PreconditionError("sphere_surface: defined for d >= 2 (d = 1 uses the half-line convention)");
  return 2.0 * std::pow(kPi, 0.5 * d) / gamma_fn(0.5 * d);
}

double angular_factor(int d) {
  if (d < 1) throw PreconditionError("angular_factor: d must be >= 1");
  return d == 1 ? 1.0 : sphere_surface(d);
}

double hardy_constant(int d, double p) {
  if (d < 1) throw PreconditionError("hardy_constant: d must be >= 1");
  if (!(p > 1.0)) throw PreconditionError("hardy_constant: p must be > 1");
  const double ratio = std::abs(static_cast<double>(d) - p) / p;
  return std::pow(ratio, p);
}

double closed_form_moment(int d, double p, double beta, double alpha) {
  if (d < 1) throw PreconditionError("closed_form_moment: d must be >= 1");
  if (!(p > 0.0)) throw PreconditionError("closed_form_moment: p must be > 0");
  if (!(alpha > 0.0)) throw PreconditionError("closed_form_moment: alpha must be > 0");
  const double q = p * beta + d;  // exponent p*beta + d must stay positive
  if (!(q > 0.0))
    throw DivergenceError("closed_form_moment: divergent integral, needs beta > -d/p");
  return angular_factor(d) * std::pow(p, (q - p) / p) * std::pow(alpha, -0.5 * q) *
         gamma_fn(q / p);
}

Normalization normalization_constant(const ProblemParams& params,
                                     std::optional<double> truncation_radius) {
  const int d = params.d();
  if (params.zero_matrix()) {
    if (!truncation_radius)
      throw PreconditionError(
          "normalization_constant: A == 0 has infinite mass, supply a truncation radius");
    const double R = *truncation_radius;
    if (!(R > 0.0))
      throw PreconditionError("normalization_constant: truncation radius must be > 0");
    const double volume = angular_factor(d) * std::pow(R, d) / d;
    return {1.0 / volume, 0.0};
  }
  if (!params.positive_definite())
    throw PreconditionError(
        "normalization_constant: A must be positive definite (or zero with a radius)");
  if (params.isotropic()) {
    const double mass = closed_form_moment(d, params.p(), 0.0, params.iso_alpha());
    return {1.0 / mass, 1e-13};
  }
  BoxOptions opts;
  opts.rel_tol = 1e-8;
  const IntegralResult mass = full_integral(
      [](const Eigen::VectorXd&) { return 1.0; }, params, opts);
  if (!mass.converged)
    throw DivergenceError("normalization_constant: mass quadrature did not reach 1e-8");
  // full_integral carries the density including c; divide it back out.
  const double bare_mass = mass.value / params.c();
  return {1.0 / bare_mass, mass.error_estimate / mass.value};
}

}  // namespace hardymu
