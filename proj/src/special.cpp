#include "hardymu/special.hpp"

#include <cmath>
#include <limits>

#include "hardymu/errors.hpp"

namespace hardymu {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lanczos coefficients for g = 7.
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_core(double x) {
  // valid for x >= 0.5
  const double z = x - 1.0;
  double series = kLanczos[0];
  for (int i = 1; i < 9; ++i) series += kLanczos[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * series;
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) throw PreconditionError("gamma_fn: argument must be positive");
  if (x < 0.5) return kPi / (std::sin(kPi * x) * lanczos_core(1.0 - x));
  return lanczos_core(x);
}

}  // namespace hardymu
