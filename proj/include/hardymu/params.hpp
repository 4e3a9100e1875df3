#pragma once

#include <Eigen/Dense>

namespace hardymu {

// Extreme eigenvalues of the symmetric matrix A.  They bound the quadratic
// form: alpha1*|x|^2 <= x^T A x <= alpha2*|x|^2 for every x.
struct SpectralBounds {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

// Rejects non-symmetric input (exact entrywise comparison).
SpectralBounds spectral_bounds(const Eigen::MatrixXd& A);

// Parameters of the weighted measure dmu = rho dx with density
//   rho(x) = c * exp(-(x^T A x)^{p/2} / p),
// taken on ]0,+inf[ when d = 1 and on R^d when d >= 2.
class ProblemParams {
 public:
  ProblemParams(int d, double p, Eigen::MatrixXd A, double c = 1.0);

  int d() const { return d_; }
  double p() const { return p_; }
  const Eigen::MatrixXd& A() const { return A_; }
  double c() const { return c_; }

  const SpectralBounds& bounds() const { return bounds_; }
  bool positive_definite() const { return positive_definite_; }
  bool zero_matrix() const { return zero_matrix_; }
  // A is exactly alpha * I (includes A == 0 with alpha = 0).
  bool isotropic() const { return isotropic_; }
  double iso_alpha() const;

 private:
  int d_;
  double p_;
  Eigen::MatrixXd A_;
  double c_;
  SpectralBounds bounds_;
  bool positive_definite_ = false;
  bool zero_matrix_ = false;
  bool isotropic_ = false;
};

// x^T A x
double quadratic_form(const ProblemParams& params, const Eigen::VectorXd& x);

// rho(x) = c * exp(-(x^T A x)^{p/2} / p)
double eval_density(const ProblemParams& params, const Eigen::VectorXd& x);
double eval_density(const ProblemParams& params, double x);  // d = 1

// Radial form of the density for isotropic A: c * exp(-alpha^{p/2} r^p / p).
double eval_density_radial(const ProblemParams& params, double r);

}  // namespace hardymu
