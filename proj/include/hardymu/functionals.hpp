#pragma once

#include <utility>

#include "hardymu/params.hpp"
#include "hardymu/test_function.hpp"

namespace hardymu {

// Evaluated terms of a Hardy-type inequality on one test function.
// The deficit is right side minus left side,
//   deficit = gradient_term + constant^{(p-1)/p} * sign * drift_term
//           - constant * hardy_term,
// nonnegative (up to error_budget) whenever the inequality holds on u.
struct HardyReport {
  double gradient_term = 0.0;  // weighted |grad u|^p mass
  double hardy_term = 0.0;     // weighted |u|^p / |x|^{...} mass
  double drift_term = 0.0;     // weighted |u|^p (x^T A x)^{p/2} / |x|^{...} mass
  double constant = 0.0;
  int sign = 0;
  double deficit = 0.0;
  double error_budget = 0.0;
};

// sign of d - p with sgn(0) = 0
int sgn_factor(int d, double p);

struct FunctionalOptions {
  double rel_tol = 0.0;          // 0 -> 1e-10 (d = 1), 1e-7 (d = 2, 3)
  double membership_tol = 1e-6;  // refinement-agreement certificate
};

// Deficit of the weighted Hardy inequality with constant C(d,p).
// Membership in W^{1,p}_mu is certified numerically: every integral must
// agree across two refinement levels; failures raise MembershipError.
HardyReport hardy_deficit(const TestFunction& u, const ProblemParams& params,
                          const FunctionalOptions& opts = {});

// Caffarelli-Kohn-Nirenberg variant with gradient weight |x|^{pa},
// remaining weights |x|^{p(a+1)}, constant (|d-p(a+1)|/p)^p.  Test functions
// must be compactly supported away from the origin.
HardyReport ckn_a_deficit(const TestFunction& u, const ProblemParams& params, double a,
                          const FunctionalOptions& opts = {});

// Variant with gradient weight |x|^{beta}, remaining weights |x|^{p+beta},
// constant (|d-(p+beta)|/p)^p.
HardyReport ckn_beta_deficit(const TestFunction& u, const ProblemParams& params, double beta,
                             const FunctionalOptions& opts = {});

struct PoincareReport {
  double gradient_term = 0.0;
  double mass_term = 0.0;  // |u|^p mass
  double constant = 0.0;   // ((p-d)/p)^{p-1} * alpha1^{p/2}
  double value = 0.0;      // gradient_term - constant * mass_term
  double error_budget = 0.0;
};

// Requires p > d and positive definite A.
PoincareReport poincare_deficit_detail(const TestFunction& u, const ProblemParams& params,
                                       const FunctionalOptions& opts = {});
double poincare_deficit(const TestFunction& u, const ProblemParams& params,
                        const FunctionalOptions& opts = {});

// (upper, lower) bounds of the shifted power-function quotient built purely
// from closed-form moments: the upper bound is the alpha1-numerator /
// alpha2-denominator estimate, the lower its sign-exact mirror.  Requires
// gamma in the admissible window and isotropic positive definite A, where
// the two collapse whenever the drift sign is +1 or lambda = 0.
std::pair<double, double> closed_form_power_functional(double gamma, double lambda,
                                                       const ProblemParams& params);

// Same chain without the isotropy requirement; used to report bounds next
// to anisotropic sweeps.
std::pair<double, double> power_quotient_bounds(int d, double p, double gamma, double lambda,
                                                double alpha1, double alpha2, double norm_a);

}  // namespace hardymu
