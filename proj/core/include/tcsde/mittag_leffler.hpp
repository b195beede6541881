#pragma once

#include <span>
#include <vector>

namespace tcsde {

// A point evaluation request for the one-parameter Mittag-Leffler function
// E_beta(z) = sum_k z^k / Gamma(beta*k + 1).
struct MLQuery {
  MLQuery(double beta_, double z_, double rel_tol_ = 1e-10);

  double beta;
  double z;
  double rel_tol;
};

// Evaluates E_beta(z) to the requested relative tolerance. Strategy:
// exp(z) at beta == 1; compensated Taylor summation while its cancellation
// certificate passes; the tail expansion in 1/z when its smallest-term
// certificate passes; otherwise adaptive Gauss-Kronrod quadrature of the
// spectral representation. Throws AccuracyError (carrying the achieved
// estimate) when no route certifies rel_tol, RangeError on overflow.
double ml_eval(const MLQuery& query);
double ml_eval(double beta, double z, double rel_tol = 1e-10);

// The decay profile E_beta(-lambda * p * t^beta) along a time grid;
// nonincreasing in t for lambda, p > 0.
std::vector<double> ml_bound_curve(double beta, double lambda, double p,
                                   std::span<const double> times);

}  // namespace tcsde
