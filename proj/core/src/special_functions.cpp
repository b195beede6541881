#include "tcsde/special_functions.hpp"

#include <cmath>

#include "tcsde/errors.hpp"

namespace tcsde {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Lanczos coefficients for g = 7, n = 9 (standard published set).
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

double log_gamma_core(double x) {
  // valid for x >= 0.5
  double acc = kLanczos[0];
  for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (x - 1.0 + i);
  const double t = x + 6.5;  // x - 1 + g + 0.5
  return 0.91893853320467274178 /* log(sqrt(2*pi)) */ +
         (x - 0.5) * std::log(t) - t + std::log(acc);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw ParameterError("log_gamma requires x > 0");
  if (x < 0.5) {
    // reflection keeps the Lanczos core out of its inaccurate region
    return std::log(kPi / sin_pi(x)) - log_gamma_core(1.0 - x);
  }
  return log_gamma_core(x);
}

double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  double sign = 1.0;
  if (r >= 1.0) {
    sign = -1.0;
    r -= 1.0;
  }
  if (r > 0.5) r = 1.0 - r;
  return sign * std::sin(kPi * r);
}

}  // namespace tcsde
