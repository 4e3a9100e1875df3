#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hardymu/params.hpp"

namespace hardymu {

// A realized one-dimensional rule: apply_rule(rule, f) ~ integral of f.
struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing
  std::vector<double> weights;  // finite, include any transform Jacobian
  std::string transform;        // "gauss-legendre" | "log-graded"
  double target_rel_tol = 1e-10;
};

// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

// Deterministic composite rule for integrals over ]0, r_max] with an
// endpoint singularity at 0: Gauss-Legendre panels on the log axis,
// panel widths doubling toward the origin.
QuadratureRule log_graded_rule(double r_max, int panels, int order);

double apply_rule(const QuadratureRule& rule, const std::function<double(double)>& f);

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long nodes_used = 0;
  bool converged = false;
  double r_max = 0.0;  // radial/box cutoff actually used
};

// Radius at which the weight exp(-alpha^{p/2} r^p / p) has fallen to e^{-40}.
double tail_radius(double p, double alpha);

struct RadialOptions {
  double rel_tol = 1e-10;
  double r_min = 0.0;  // > 0 restricts the domain to [r_min, r_max]
  double r_max = 0.0;  // 0 = automatic tail cutoff (requires alpha > 0)
  // The integrand gains a factor r^{power_shift} that is kept in log space,
  // so power singularities never leave the representable range.  With a
  // nonzero shift, `profile` is the smooth remainder and is evaluated at
  // r = 0 exactly when the mapped domain runs past double range; it must
  // return its r -> 0+ limit there.
  double power_shift = 0.0;
  int base_order = 16;
  int max_panels = 4000;
};

// angular_factor(d) * integral_0^inf profile(r) r^{power_shift + d - 1}
//                     exp(-alpha^{p/2} r^p / p) dr
// for isotropic params (A = alpha I, or A == 0 with explicit bounds; the
// weight is then 1 and the profile must have compact support).  Adaptive
// Gauss-Legendre panels on the log axis, refined toward r = 0.  Divergent
// integrands (no decay toward the origin) raise DivergenceError.
IntegralResult radial_integral(const std::function<double(double)>& profile, int d,
                               const ProblemParams& params,
                               const RadialOptions& opts = {});

struct BoxOptions {
  double rel_tol = 0.0;      // 0 -> 1e-10 for d = 1, 1e-7 for d = 2, 3
  double r_max = 0.0;        // 0 -> tail rule via the smallest eigenvalue
  int uniform_per_half = 0;  // uniform panels per half axis (0 -> default by d)
  int dyadic_levels = 0;     // dyadic grading levels toward 0 (0 -> default)
  int order = 0;             // Gauss-Legendre points per axis (0 -> default)
  // Radial support hint: cells entirely outside [support_lo, support_hi]
  // are skipped.  Only valid if the integrand vanishes there.
  double support_lo = 0.0;
  double support_hi = 0.0;
};

// integral of integrand(x) * rho(x) over [-R, R]^d (d = 2, 3) or [eps, R]
// (d = 1), tensorized Gauss-Legendre cells on a mesh graded dyadically
// toward the origin.  Two passes at different resolutions provide the error
// estimate; non-convergence is reported through the flag, not thrown.
IntegralResult full_integral(const std::function<double(const Eigen::VectorXd&)>& integrand,
                             const ProblemParams& params, const BoxOptions& opts = {});

struct PolarOptions {
  // Angular factor q(omega)^{angular_power} with q = omega^T A omega joins
  // the integrand (the drift weight needs p/2).
  double angular_power = 0.0;
  RadialOptions radial;
};

// integral of profile(|x|) * q(x/|x|)^{angular_power} * rho(x) over R^d for
// d = 2, 3 and positive definite A: exact angular decomposition, periodic
// trapezoid (d = 2) or product Gauss/trapezoid (d = 3) outside, the adaptive
// log-radial engine inside with alpha = q(omega) per direction.  Handles the
// same power_shift singularities as radial_integral.
IntegralResult polar_radial_integral(const std::function<double(double)>& profile,
                                     const ProblemParams& params,
                                     const PolarOptions& opts = {});

}  // namespace hardymu
