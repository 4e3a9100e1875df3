#pragma once

#include <optional>

#include "hardymu/params.hpp"

namespace hardymu {

// Surface measure of the unit sphere S_{d-1}: 2 pi^{d/2} / Gamma(d/2).
// Only defined for d >= 2; the d = 1 half-line convention uses factor 1
// and is handled by angular_factor.
double sphere_surface(int d);

// 1 for d = 1 (integrals run over ]0,+inf[), sphere_surface(d) otherwise.
double angular_factor(int d);

// Sharp constant C(d,p) = (|d-p|/p)^p; zero exactly at p = d.
double hardy_constant(int d, double p);

// Exact value of
//   integral |x|^{p beta} exp(-alpha^{p/2} |x|^p / p) dx
// over ]0,+inf[ (d=1) or R^d (d>=2):
//   angular_factor(d) * p^{(p beta + d - p)/p} * alpha^{-(p beta + d)/2}
//                     * Gamma(beta + d/p).
// Requires beta > -d/p; smaller beta makes the integral divergent.
double closed_form_moment(int d, double p, double beta, double alpha);

struct Normalization {
  double value = 0.0;      // c* with mu(domain) = 1
  double rel_error = 0.0;  // reported relative error of the mass computation
};

// Scale c* that turns the density into a probability measure.  Closed form
// when A = alpha I with alpha > 0, quadrature for anisotropic positive
// definite A (d <= 3).  A == 0 needs an explicit truncation radius, the
// measure has infinite mass otherwise.
Normalization normalization_constant(const ProblemParams& params,
                                     std::optional<double> truncation_radius = {});

}  // namespace hardymu
