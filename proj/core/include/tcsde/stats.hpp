#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tcsde/rng.hpp"

namespace tcsde {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::size_t n = 0;
};

MeanSe mean_se(std::span<const double> sample);

struct KsResult {
  double statistic = 0.0;  // sup |F1 - F2|
  double critical = 0.0;   // threshold at the requested level
  bool accept = false;     // statistic <= critical
};

// Two-sample Kolmogorov-Smirnov test at significance alpha, using the
// large-sample critical value c(alpha) * sqrt((n+m)/(n*m)) with
// c(alpha) = sqrt(-log(alpha/2)/2).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double alpha);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_ss = 0.0;  // sum of squared residuals in the fit space
  std::size_t n = 0;
};

// Ordinary least squares y ~ intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// OLS on (log x, log y); all inputs must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

// OLS on (x, log y); y must be positive.
LineFit fit_semilog(std::span<const double> x, std::span<const double> y);

struct BootstrapCi {
  double lo = 0.0;
  double hi = 0.0;
  double point = 0.0;  // estimate on the full sample
};

// Percentile bootstrap confidence interval for the log-log slope of a mean
// curve. per_path is row-major (n_paths x n_times); columns are averaged
// after resampling paths with replacement.
BootstrapCi bootstrap_loglog_slope(const std::vector<std::vector<double>>& per_path,
                                   std::span<const double> times,
                                   int n_resamples, double confidence,
                                   RngStream& rng);

}  // namespace tcsde
