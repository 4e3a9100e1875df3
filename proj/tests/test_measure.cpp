#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hardymu/errors.hpp"
#include "hardymu/measure.hpp"
#include "hardymu/params.hpp"
#include "hardymu/quadrature.hpp"
#include "hardymu/special.hpp"
#include "oracles.hpp"

using namespace hardymu;

namespace {
constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXd mat1(double a) {
  Eigen::MatrixXd A(1, 1);
  A(0, 0) = a;
  return A;
}
}  // namespace

TEST_CASE("gamma function hits the classical anchors") {
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-14));
  double factorial = 1.0;
  for (int n = 1; n <= 12; ++n) {
    CHECK(gamma_fn(n) == doctest::Approx(factorial).epsilon(1e-13));
    factorial *= n;
  }
  CHECK(gamma_fn(1.5) == doctest::Approx(0.5 * std::sqrt(kPi)).epsilon(1e-14));
}

TEST_CASE("gamma function tracks the library gamma to 1e-13 on [0.1, 30]") {
  for (int i = 0; i <= 2990; ++i) {
    const double x = 0.1 + i * 0.01;
    const double ref = std::tgamma(x);
    CHECK(std::abs(gamma_fn(x) - ref) <= 1e-13 * std::abs(ref));
  }
  // reflection region
  for (double x : {0.01, 0.05, 0.2, 0.49}) {
    const double ref = std::tgamma(x);
    CHECK(std::abs(gamma_fn(x) - ref) <= 1e-13 * std::abs(ref));
  }
  CHECK_THROWS_AS(gamma_fn(0.0), PreconditionError);
  CHECK_THROWS_AS(gamma_fn(-1.0), PreconditionError);
}

TEST_CASE("density evaluation") {
  SUBCASE("A == 0 makes the density constant") {
    ProblemParams params(1, 2.0, mat1(0.0), 1.0);
    CHECK(eval_density(params, 7.0) == 1.0);
  }
  SUBCASE("d = 1 direct substitution") {
    ProblemParams params(1, 2.0, mat1(1.0), 1.0);
    CHECK(eval_density(params, 1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  }
  SUBCASE("d = 2 anisotropic point value") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 4.0;
    ProblemParams params(2, 3.0, A, 2.0);
    Eigen::VectorXd x(2);
    x << 1.0, 1.0;
    // independent scalar evaluation: x^T A x = 1 + 4 = 5
    const double quad = 1.0 * 1.0 * 1.0 + 4.0 * 1.0 * 1.0;
    CHECK(quad == 5.0);
    const double expected = 2.0 * std::exp(-std::pow(5.0, 1.5) / 3.0);
    CHECK(eval_density(params, x) == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("problem parameter invariants") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.5, 0.4, 1.0;
  CHECK_THROWS_AS(ProblemParams(2, 2.0, bad), PreconditionError);
  Eigen::MatrixXd neg(2, 2);
  neg << 1.0, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(ProblemParams(2, 2.0, neg), PreconditionError);
  CHECK_THROWS_AS(ProblemParams(1, 1.0, mat1(1.0)), PreconditionError);
  CHECK_THROWS_AS(ProblemParams(0, 2.0, Eigen::MatrixXd::Identity(0, 0)),
                  PreconditionError);

  ProblemParams iso(2, 2.0, 3.0 * Eigen::MatrixXd::Identity(2, 2));
  CHECK(iso.isotropic());
  CHECK(iso.iso_alpha() == 3.0);
  CHECK(iso.positive_definite());

  ProblemParams zero(1, 2.0, mat1(0.0));
  CHECK(zero.zero_matrix());
  CHECK(zero.isotropic());
  CHECK_FALSE(zero.positive_definite());
}

TEST_CASE("spectral bounds") {
  SUBCASE("identity and diagonal") {
    const SpectralBounds id = spectral_bounds(Eigen::MatrixXd::Identity(3, 3));
    CHECK(id.alpha1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(id.alpha2 == doctest::Approx(1.0).epsilon(1e-14));
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
    D(0, 0) = 1.0;
    D(1, 1) = 4.0;
    const SpectralBounds db = spectral_bounds(D);
    CHECK(db.alpha1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(db.alpha2 == doctest::Approx(4.0).epsilon(1e-14));
  }
  SUBCASE("2x2 dense against the characteristic-polynomial roots") {
    Eigen::MatrixXd A(2, 2);
    A << 2.0, 1.0, 1.0, 2.0;
    // trace 4, det 3: eigenvalues (4 +- sqrt(16-12))/2 = {1, 3}
    const double tr = 4.0, det = 3.0;
    const double disc = std::sqrt(tr * tr - 4.0 * det);
    const SpectralBounds sb = spectral_bounds(A);
    CHECK(sb.alpha1 == doctest::Approx(0.5 * (tr - disc)).epsilon(1e-12));
    CHECK(sb.alpha2 == doctest::Approx(0.5 * (tr + disc)).epsilon(1e-12));
  }
  SUBCASE("non-symmetric input is rejected") {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 0.1, 0.0, 1.0;
    CHECK_THROWS_AS(spectral_bounds(A), PreconditionError);
  }
  SUBCASE("quadratic form sandwich on sampled points") {
    Eigen::MatrixXd A(3, 3);
    A << 3.0, 0.5, 0.2, 0.5, 2.0, 0.1, 0.2, 0.1, 1.0;
    ProblemParams params(3, 2.0, A);
    const auto& b = params.bounds();
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd x(3);
      for (int i = 0; i < 3; ++i) x(i) = dist(rng);
      const double q = quadratic_form(params, x);
      const double n2 = x.squaredNorm();
      CHECK(q >= b.alpha1 * n2 - 1e-12);
      CHECK(q <= b.alpha2 * n2 + 1e-12);
      CHECK(q <= b.alpha2 * n2 + 1e-12);  // |A| for symmetric PSD is alpha2
    }
  }
}

TEST_CASE("sphere surface") {
  CHECK(sphere_surface(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(sphere_surface(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  // Gamma(2) = 1
  CHECK(sphere_surface(4) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-13));
  CHECK_THROWS_AS(sphere_surface(1), PreconditionError);
  CHECK(angular_factor(1) == 1.0);
  CHECK(angular_factor(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
}

TEST_CASE("closed-form moments against independent quadrature") {
  SUBCASE("d = 1 half-line Gaussian mass") {
    // oracle: adaptive Simpson of exp(-x^2/2) over [0, 30]
    const double oracle = oracles::adaptive_simpson(
        [](double x) { return std::exp(-0.5 * x * x); }, 0.0, 30.0, 1e-14);
    CHECK(oracle == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-12));
    CHECK(closed_form_moment(1, 2.0, 0.0, 1.0) == doctest::Approx(oracle).epsilon(1e-12));
  }
  SUBCASE("d = 1 second moment") {
    const double oracle = oracles::adaptive_simpson(
        [](double x) { return x * x * std::exp(-0.5 * x * x); }, 0.0, 30.0, 1e-14);
    CHECK(closed_form_moment(1, 2.0, 1.0, 1.0) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(closed_form_moment(1, 2.0, 1.0, 1.0) ==
          doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-12));
  }
  SUBCASE("d = 3 Gaussian mass by tensor oracle") {
    const double oracle = oracles::tensor3_midpoint(
        [](double x, double y, double z) {
          return std::exp(-0.5 * (x * x + y * y + z * z));
        },
        8.0, 160);
    CHECK(oracle == doctest::Approx(std::pow(2.0 * kPi, 1.5)).epsilon(1e-5));
    CHECK(closed_form_moment(3, 2.0, 0.0, 1.0) ==
          doctest::Approx(std::pow(2.0 * kPi, 1.5)).epsilon(1e-13));
  }
  SUBCASE("divergent exponent is rejected") {
    CHECK_THROWS_AS(closed_form_moment(1, 2.0, -0.5, 1.0), DivergenceError);
    CHECK_THROWS_AS(closed_form_moment(1, 2.0, -0.7, 1.0), DivergenceError);
    CHECK_THROWS_AS(closed_form_moment(3, 2.0, -1.5, 1.0), DivergenceError);
  }
}

TEST_CASE("moment sandwich for anisotropic positive definite A") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 4.0;
  for (double p : {1.5, 2.0, 3.0}) {
    ProblemParams params(2, p, A, 1.0);
    for (double beta : {-0.3, 0.0, 0.5, 1.0}) {
      const IntegralResult mid = full_integral(
          [beta, p](const Eigen::VectorXd& x) {
            return std::pow(x.norm(), p * beta);
          },
          params);
      const double upper = closed_form_moment(2, p, beta, params.bounds().alpha1);
      const double lower = closed_form_moment(2, p, beta, params.bounds().alpha2);
      CHECK(mid.value <= upper * (1.0 + 1e-6));
      CHECK(mid.value >= lower * (1.0 - 1e-6));
    }
  }
}

TEST_CASE("normalization constant") {
  SUBCASE("isotropic closed form") {
    ProblemParams params(1, 2.0, mat1(1.0));
    const Normalization n = normalization_constant(params);
    CHECK(n.value == doctest::Approx(1.0 / std::sqrt(kPi / 2.0)).epsilon(1e-12));
    CHECK(n.rel_error <= 1e-8);
  }
  SUBCASE("isotropic non-unit alpha against quadrature oracle") {
    ProblemParams params(1, 2.0, mat1(4.0));
    const double mass = oracles::adaptive_simpson(
        [](double x) { return std::exp(-0.5 * 4.0 * x * x); }, 0.0, 20.0, 1e-14);
    const Normalization n = normalization_constant(params);
    CHECK(n.value == doctest::Approx(1.0 / mass).epsilon(1e-10));
    CHECK(n.value ==
          doctest::Approx(1.0 / closed_form_moment(1, 2.0, 0.0, 4.0)).epsilon(1e-13));
  }
  SUBCASE("zero matrix needs a truncation radius") {
    ProblemParams params(1, 2.0, mat1(0.0));
    CHECK_THROWS_AS(normalization_constant(params), PreconditionError);
    const Normalization n = normalization_constant(params, 2.5);
    CHECK(n.value == doctest::Approx(0.4).epsilon(1e-14));
  }
  SUBCASE("anisotropic mass via box quadrature") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 4.0;
    ProblemParams params(2, 2.0, A, 3.0);  // the scale c must not matter
    const Normalization n = normalization_constant(params);
    // p = 2 separable Gaussian: mass = 2 pi / sqrt(det A)
    CHECK(n.value == doctest::Approx(std::sqrt(4.0) / (2.0 * kPi)).epsilon(1e-7));
  }
}

TEST_CASE("hardy constant") {
  CHECK(hardy_constant(3, 2.0) == 0.25);  // matches the classical d=3 threshold
  CHECK(hardy_constant(2, 2.0) == 0.0);
  CHECK(hardy_constant(1, 1.5) == doctest::Approx(std::pow(1.0 / 3.0, 1.5)).epsilon(1e-15));
  SUBCASE("vanishes exactly at p = d and is continuous in p") {
    CHECK(hardy_constant(3, 3.0) == 0.0);
    double prev = hardy_constant(2, 1.5);
    for (double p = 1.6; p < 2.0; p += 0.05) {
      const double cur = hardy_constant(2, p);
      CHECK(cur < prev);  // decreasing toward 0 at p = d = 2
      prev = cur;
    }
    CHECK(hardy_constant(2, 2.0 - 1e-9) < 1e-8);
    CHECK(hardy_constant(2, 2.0 + 1e-9) < 1e-8);
  }
}
