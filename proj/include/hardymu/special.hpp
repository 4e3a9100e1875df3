#pragma once

namespace hardymu {

// Gamma function on the positive half line, Lanczos approximation
// (g = 7, 9 coefficients) with the reflection formula below 1/2.
// Relative error stays below 1e-13 on [0.1, 30].
double gamma_fn(double x);

}  // namespace hardymu
