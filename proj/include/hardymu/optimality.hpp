#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hardymu/params.hpp"
#include "hardymu/test_function.hpp"

namespace hardymu {

// Shifted Rayleigh quotient of phi = |x|^gamma evaluated by quadrature:
//   [ grad_term + lambda^{(p-1)/p} sgn(d-p) drift_term - lambda hardy_term ]
//   / denom
// together with the closed-form bound chain for reference.
struct QuotientPoint {
  double gamma = 0.0;
  double offset = 0.0;  // gamma - (1 - d/p)
  double quotient = 0.0;
  double grad_term = 0.0;
  double drift_term = 0.0;
  double hardy_term = 0.0;
  double denom = 0.0;
  double err_budget = 0.0;
  double bound_upper = 0.0;
  double bound_lower = 0.0;
  bool ok = false;
  std::string note;
};

struct SweepResult {
  double lambda = 0.0;
  std::vector<double> gamma_values;  // strictly decreasing toward 1 - d/p
  std::vector<double> quotients;     // finite values, matching gamma_values
  bool diverged = false;
  std::optional<double> crossing_gamma;  // first gamma with quotient < -M
  std::vector<QuotientPoint> points;     // full breakdown, failures included
  int n_failed = 0;
  std::string breakdown_note;
};

struct SweepOptions {
  double rel_tol = 1e-9;
  double offset_floor = 1e-8;  // below this the sweep declares breakdown
};

QuotientPoint shifted_quotient_detail(double gamma, double lambda,
                                      const ProblemParams& params,
                                      const SweepOptions& opts = {});
double shifted_quotient(double gamma, double lambda, const ProblemParams& params,
                        const SweepOptions& opts = {});

// Gamma grid geometrically approaching 1 - d/p (offsets 2^{-k} times the
// window width, k = 1..n_points).  Per-point quadrature failures are
// recorded, not fatal.
SweepResult optimality_sweep(double lambda, const ProblemParams& params, int n_points,
                             double big_m, const SweepOptions& opts = {});

struct Witness {
  std::optional<TestFunction> fn;  // power(gamma*) with quotient < -M
  QuotientPoint point;
  std::string note;  // breakdown diagnostics when not found
};

// Concrete violating function for lambda > C(d,p); PreconditionError below.
Witness find_violating_function(double lambda, double big_m, const ProblemParams& params,
                                const SweepOptions& opts = {});

// Bisection on lambda with diverged(M, min_offset) as predicate; returns the
// midpoint of the final bracket.  Requires the predicate to be false at lo
// and true at hi.
double threshold_bisection(const ProblemParams& params, double lambda_lo, double lambda_hi,
                           double big_m, double min_offset, int iterations,
                           const SweepOptions& opts = {});

// CSV export: gamma,quotient,grad_term,drift_term,hardy_term,denom,err_budget
void write_sweep_csv(const SweepResult& result, std::ostream& out);

}  // namespace hardymu
