#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hardymu/errors.hpp"
#include "hardymu/measure.hpp"
#include "hardymu/params.hpp"
#include "hardymu/quadrature.hpp"
#include "oracles.hpp"

using namespace hardymu;

namespace {
constexpr double kPi = 3.14159265358979323846;

ProblemParams iso(int d, double p, double alpha, double c = 1.0) {
  return ProblemParams(d, p, alpha * Eigen::MatrixXd::Identity(d, d), c);
}
}  // namespace

TEST_CASE("gauss-legendre rule invariants") {
  for (int n : {8, 12, 16, 24}) {
    const QuadratureRule rule = gauss_legendre(n);
    CHECK(rule.nodes.size() == static_cast<std::size_t>(n));
    CHECK(rule.nodes.size() >= 8);
    double wsum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      if (i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
      CHECK(std::isfinite(rule.weights[i]));
      wsum += rule.weights[i];
    }
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    // degree-(2n-1) exactness spot check on x^6
    double m6 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      m6 += rule.weights[i] * std::pow(rule.nodes[i], 6);
    CHECK(m6 == doctest::Approx(2.0 / 7.0).epsilon(1e-13));
  }
  CHECK(gauss_legendre(16).transform == "gauss-legendre");
}

TEST_CASE("log-graded rule handles endpoint singularities") {
  const QuadratureRule rule = log_graded_rule(1.0, 24, 16);
  CHECK(rule.transform == "log-graded");
  CHECK(rule.nodes.size() >= 8);
  for (std::size_t i = 1; i < rule.nodes.size(); ++i)
    CHECK(rule.nodes[i] > rule.nodes[i - 1]);
  // integral_0^1 r^{-1/2} dr = 2, integral_0^1 r^{1/2} dr = 2/3
  CHECK(apply_rule(rule, [](double r) { return 1.0 / std::sqrt(r); }) ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(apply_rule(rule, [](double r) { return std::sqrt(r); }) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("radial integral matches closed-form moments") {
  SUBCASE("unit profile, d = 1, p = 2") {
    const IntegralResult res =
        radial_integral([](double) { return 1.0; }, 1, iso(1, 2.0, 1.0));
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-10));
    CHECK(res.error_estimate <= 1e-10 * std::abs(res.value));
  }
  SUBCASE("in-window singular power, d = 1, p = 2") {
    // gamma = 0.7 in the admissible window (0.5, 1): beta = gamma - 1 = -0.3
    RadialOptions opts;
    opts.power_shift = 2.0 * (0.7 - 1.0);
    const IntegralResult res =
        radial_integral([](double) { return 1.0; }, 1, iso(1, 2.0, 1.0), opts);
    CHECK(res.converged);
    CHECK(res.value ==
          doctest::Approx(closed_form_moment(1, 2.0, -0.3, 1.0)).epsilon(1e-9));
  }
  SUBCASE("log-divergent integrand raises a divergence error") {
    CHECK_THROWS_AS(
        radial_integral([](double r) { return 1.0 / r; }, 1, iso(1, 2.0, 1.0)),
        DivergenceError);
    RadialOptions opts;
    opts.power_shift = -1.0;  // same integrand, exactly represented
    CHECK_THROWS_AS(
        radial_integral([](double) { return 1.0; }, 1, iso(1, 2.0, 1.0), opts),
        DivergenceError);
    // exponent below -d/p: r^{-1.4} weight (would be beta = -0.7 at p = 2)
    opts.power_shift = -1.4;
    CHECK_THROWS_AS(
        radial_integral([](double) { return 1.0; }, 1, iso(1, 2.0, 1.0), opts),
        DivergenceError);
  }
  SUBCASE("moment grid agreement across d, p, beta, alpha") {
    for (int d : {1, 2, 3}) {
      for (double p : {1.5, 2.0, 3.0}) {
        for (double beta : {-d / p + 0.1, 0.0, 0.5, 1.0, 2.0}) {
          for (double alpha : {0.5, 1.0, 2.0}) {
            RadialOptions opts;
            opts.power_shift = p * beta;
            opts.rel_tol = d == 1 ? 1e-10 : 1e-8;
            const IntegralResult res =
                radial_integral([](double) { return 1.0; }, d, iso(d, p, alpha), opts);
            const double exact = closed_form_moment(d, p, beta, alpha);
            const double tol = d == 1 ? 1e-8 : 1e-5;
            CHECK(std::abs(res.value - exact) <= tol * exact);
          }
        }
      }
    }
  }
  SUBCASE("near-critical exponents stay accurate") {
    for (double eps : {1e-3, 1e-5, 1e-6, 1e-7}) {
      RadialOptions opts;
      opts.power_shift = eps - 1.0;  // d + shift = eps
      const IntegralResult res =
          radial_integral([](double) { return 1.0; }, 1, iso(1, 2.0, 1.0), opts);
      const double exact = closed_form_moment(1, 2.0, (eps - 1.0) / 2.0, 1.0);
      CHECK(res.converged);
      CHECK(std::abs(res.value - exact) <= 1e-7 * exact);
    }
  }
  SUBCASE("compact support restriction") {
    RadialOptions opts;
    opts.r_min = 1.0;
    opts.r_max = 2.0;
    const IntegralResult res =
        radial_integral([](double) { return 1.0; }, 1, iso(1, 2.0, 1.0), opts);
    const double oracle = oracles::adaptive_simpson(
        [](double x) { return std::exp(-0.5 * x * x); }, 1.0, 2.0, 1e-14);
    CHECK(res.value == doctest::Approx(oracle).epsilon(1e-10));
  }
  SUBCASE("A == 0 demands explicit bounds, then integrates dry") {
    CHECK_THROWS_AS(radial_integral([](double) { return 1.0; }, 1, iso(1, 2.0, 0.0)),
                    PreconditionError);
    RadialOptions opts;
    opts.r_min = 1.0;
    opts.r_max = 3.0;
    const IntegralResult res =
        radial_integral([](double r) { return r; }, 1, iso(1, 2.0, 0.0), opts);
    CHECK(res.value == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("anisotropic input is rejected at this entry point") {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 2.0;
    ProblemParams params(2, 2.0, A);
    CHECK_THROWS_AS(radial_integral([](double) { return 1.0; }, 2, params),
                    PreconditionError);
  }
}

TEST_CASE("radial integral linearity") {
  const auto f = [](double r) { return std::exp(-0.1 * r); };
  const auto g = [](double r) { return 1.0 / (1.0 + r * r); };
  const ProblemParams params = iso(1, 2.0, 1.0);
  const double a = 2.5, b = -1.25;
  const IntegralResult rf = radial_integral(f, 1, params);
  const IntegralResult rg = radial_integral(g, 1, params);
  const IntegralResult rc = radial_integral(
      [&](double r) { return a * f(r) + b * g(r); }, 1, params);
  const double combined_err = 2.0 * (std::abs(a) * rf.error_estimate +
                                     std::abs(b) * rg.error_estimate + rc.error_estimate);
  CHECK(std::abs(rc.value - (a * rf.value + b * rg.value)) <=
        combined_err + 1e-14 * std::abs(rc.value));
}

TEST_CASE("refinement monotonicity of the reported error") {
  const ProblemParams params = iso(1, 2.0, 1.0);
  const std::vector<std::function<double(double)>> corpus = {
      [](double) { return 1.0; },
      [](double r) { return std::exp(-r); },
      [](double r) { return std::sqrt(r); },
      [](double r) { return 1.0 / (1.0 + r); },
      [](double r) { return std::cos(3.0 * r); },
  };
  for (const auto& f : corpus) {
    RadialOptions coarse;
    coarse.base_order = 8;
    coarse.rel_tol = 1e-6;
    RadialOptions fine = coarse;
    fine.base_order = 16;
    const IntegralResult rc = radial_integral(f, 1, params, coarse);
    const IntegralResult rf = radial_integral(f, 1, params, fine);
    CHECK(rf.error_estimate <= rc.error_estimate * (1.0 + 1e-12));
  }
}

TEST_CASE("polar decomposition agrees with the box quadrature") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 4.0;
  const ProblemParams params(2, 3.0, A, 2.0);
  SUBCASE("smooth radial profile") {
    const auto profile = [](double r) { return std::exp(-0.3 * r); };
    const IntegralResult polar = polar_radial_integral(profile, params);
    const IntegralResult box = full_integral(
        [&](const Eigen::VectorXd& x) { return profile(x.norm()); }, params);
    CHECK(polar.converged);
    CHECK(polar.value == doctest::Approx(box.value).epsilon(1e-6));
  }
  SUBCASE("drift weight splits into the angular factor") {
    PolarOptions opts;
    opts.angular_power = 0.5 * params.p();
    const auto profile = [&](double r) { return std::pow(r, params.p()); };
    const IntegralResult polar = polar_radial_integral(profile, params, opts);
    const IntegralResult box = full_integral(
        [&](const Eigen::VectorXd& x) {
          return std::pow(quadratic_form(params, x), 0.5 * params.p());
        },
        params);
    CHECK(polar.value == doctest::Approx(box.value).epsilon(1e-6));
  }
  SUBCASE("singular power via the radial shift") {
    PolarOptions opts;
    opts.radial.power_shift = -1.1;
    const IntegralResult polar =
        polar_radial_integral([](double) { return 1.0; }, params, opts);
    const IntegralResult box = full_integral(
        [](const Eigen::VectorXd& x) { return std::pow(x.norm(), -1.1); }, params);
    CHECK(polar.converged);
    // the box struggles near the origin; compare at its own accuracy
    CHECK(polar.value ==
          doctest::Approx(box.value)
              .epsilon(10.0 * box.error_estimate / std::abs(box.value) + 1e-6));
  }
  SUBCASE("entry-point preconditions") {
    CHECK_THROWS_AS(
        polar_radial_integral([](double) { return 1.0; },
                              ProblemParams(1, 2.0, Eigen::MatrixXd::Identity(1, 1))),
        PreconditionError);
    CHECK_THROWS_AS(
        polar_radial_integral([](double) { return 1.0; },
                              ProblemParams(2, 2.0, Eigen::MatrixXd::Zero(2, 2))),
        PreconditionError);
  }
}

TEST_CASE("full integral") {
  SUBCASE("d = 1 weighted mass matches the radial value") {
    ProblemParams params = iso(1, 2.0, 1.0);
    const IntegralResult res =
        full_integral([](const Eigen::VectorXd&) { return 1.0; }, params);
    CHECK(res.converged);
    CHECK(res.value == doctest::Approx(std::sqrt(kPi / 2.0)).epsilon(1e-9));
  }
  SUBCASE("d = 2 isotropic mass agrees with the radial reduction") {
    ProblemParams params = iso(2, 2.0, 1.0);
    const IntegralResult box =
        full_integral([](const Eigen::VectorXd&) { return 1.0; }, params);
    const IntegralResult radial =
        radial_integral([](double) { return 1.0; }, 2, params);
    CHECK(box.converged);
    CHECK(box.value == doctest::Approx(radial.value).epsilon(1e-7));
    CHECK(box.value == doctest::Approx(2.0 * kPi).epsilon(1e-7));  // 2 pi (e^{-r^2/2} moment)
  }
  SUBCASE("odd integrand integrates to zero") {
    ProblemParams params = iso(2, 2.0, 1.0);
    const IntegralResult res =
        full_integral([](const Eigen::VectorXd& x) { return x(0); }, params);
    CHECK(std::abs(res.value) <= 1e-7);
  }
  SUBCASE("d = 3 smoke against the closed form") {
    ProblemParams params = iso(3, 2.0, 1.0);
    const IntegralResult res =
        full_integral([](const Eigen::VectorXd&) { return 1.0; }, params);
    CHECK(res.value ==
          doctest::Approx(closed_form_moment(3, 2.0, 0.0, 1.0)).epsilon(1e-5));
  }
  SUBCASE("non-convergence is reported with the flag, not thrown") {
    ProblemParams params = iso(2, 2.0, 1.0);
    BoxOptions rough;
    rough.order = 4;
    rough.uniform_per_half = 4;
    rough.dyadic_levels = 6;
    const IntegralResult res = full_integral(
        [](const Eigen::VectorXd& x) { return std::cos(40.0 * x.squaredNorm()); },
        params, rough);
    CHECK_FALSE(res.converged);
    CHECK(std::isfinite(res.value));
    CHECK(res.error_estimate > 0.0);
  }
  SUBCASE("d > 3 is rejected") {
    ProblemParams params(4, 2.0, Eigen::MatrixXd::Identity(4, 4));
    CHECK_THROWS_AS(full_integral([](const Eigen::VectorXd&) { return 1.0; }, params),
                    PreconditionError);
  }
  SUBCASE("support hint does not change supported integrands") {
    ProblemParams params = iso(2, 2.0, 1.0);
    auto ring = [](const Eigen::VectorXd& x) {
      const double r = x.norm();
      const double z = (r - 1.5) / 0.5;
      return std::abs(z) < 1.0 ? std::exp(-1.0 / (1.0 - z * z)) : 0.0;
    };
    const IntegralResult plain = full_integral(ring, params);
    BoxOptions hinted;
    hinted.support_lo = 1.0;
    hinted.support_hi = 2.0;
    const IntegralResult fast = full_integral(ring, params, hinted);
    CHECK(fast.value == doctest::Approx(plain.value).epsilon(1e-9));
    CHECK(fast.nodes_used < plain.nodes_used);
  }
}
