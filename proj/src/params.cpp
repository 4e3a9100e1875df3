#include "hardymu/params.hpp"

#include <cmath>

#include "hardymu/errors.hpp"

namespace hardymu {

SpectralBounds spectral_bounds(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols())
    throw PreconditionError("spectral_bounds: matrix must be square");
  if (A != A.transpose())
    throw PreconditionError("spectral_bounds: matrix must be symmetric");
  if (A.rows() == 1) return {A(0, 0), A(0, 0)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

ProblemParams::ProblemParams(int d, double p, Eigen::MatrixXd A, double c)
    : d_(d), p_(p), A_(std::move(A)), c_(c) {
  if (d_ < 1) throw PreconditionError("ProblemParams: dimension must be >= 1");
  if (!(p_ > 1.0)) throw PreconditionError("ProblemParams: exponent p must be > 1");
  if (!(c_ > 0.0)) throw PreconditionError("ProblemParams: density scale c must be > 0");
  if (A_.rows() != d_ || A_.cols() != d_)
    throw PreconditionError("ProblemParams: A must be d x d");
  if (A_ != A_.transpose())
    throw PreconditionError("ProblemParams: A must be symmetric");

  bounds_ = spectral_bounds(A_);
  const double scale = std::max(1.0, bounds_.alpha2);
  if (bounds_.alpha1 < -1e-12 * scale)
    throw PreconditionError("ProblemParams: A must be positive semi-definite");
  bounds_.alpha1 = std::max(bounds_.alpha1, 0.0);
  positive_definite_ = bounds_.alpha1 > 0.0;
  zero_matrix_ = A_.isZero(0.0);
  isotropic_ = (A_ == A_(0, 0) * Eigen::MatrixXd::Identity(d_, d_));
}

double ProblemParams::iso_alpha() const {
  if (!isotropic_) throw PreconditionError("iso_alpha: A is not isotropic");
  return A_(0, 0);
}

double quadratic_form(const ProblemParams& params, const Eigen::VectorXd& x) {
  return x.dot(params.A() * x);
}

double eval_density(const ProblemParams& params, const Eigen::VectorXd& x) {
  const double q = quadratic_form(params, x);
  if (q <= 0.0) return params.c();
  return params.c() * std::exp(-std::pow(q, 0.5 * params.p()) / params.p());
}

double eval_density(const ProblemParams& params, double x) {
  Eigen::VectorXd v(1);
  v(0) = x;
  return eval_density(params, v);
}

double eval_density_radial(const ProblemParams& params, double r) {
  const double alpha = params.iso_alpha();
  if (alpha == 0.0) return params.c();
  const double p = params.p();
  return params.c() * std::exp(-std::pow(alpha, 0.5 * p) * std::pow(r, p) / p);
}

}  // namespace hardymu
