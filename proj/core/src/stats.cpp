#include "tcsde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcsde/errors.hpp"

namespace tcsde {

MeanSe mean_se(std::span<const double> sample) {
  if (sample.empty()) throw ParameterError("mean_se needs a nonempty sample");
  MeanSe out;
  out.n = sample.size();
  double acc = 0.0;
  for (double v : sample) acc += v;
  out.mean = acc / static_cast<double>(out.n);
  if (out.n == 1) return out;
  double ss = 0.0;
  for (double v : sample) {
    const double d = v - out.mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(out.n - 1);
  out.se = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double alpha) {
  if (a.size() < 2 || b.size() < 2) {
    throw ParameterError("KS test needs at least two points per sample");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw ParameterError("KS significance level must lie in (0,1)");
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx -
                             static_cast<double>(j) / ny));
  }
  KsResult out;
  out.statistic = d;
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  out.critical = c * std::sqrt((nx + ny) / (nx * ny));
  out.accept = out.statistic <= out.critical;
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("line fit needs matching samples of size >= 2");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw ParameterError("line fit needs nonconstant abscissae");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.n = x.size();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (out.intercept + out.slope * x[k]);
    out.residual_ss += r * r;
  }
  return out;
}

namespace {

std::vector<double> log_all(std::span<const double> v, const char* what) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double u : v) {
    if (!(u > 0.0)) {
      throw DataError(std::string(what) +
                      " must be positive for a logarithmic fit");
    }
    out.push_back(std::log(u));
  }
  return out;
}

}  // namespace

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  const auto lx = log_all(x, "abscissae");
  const auto ly = log_all(y, "ordinates");
  return fit_line(lx, ly);
}

LineFit fit_semilog(std::span<const double> x, std::span<const double> y) {
  const auto ly = log_all(y, "ordinates");
  return fit_line(x, ly);
}

BootstrapCi bootstrap_loglog_slope(const std::vector<std::vector<double>>& per_path,
                                   std::span<const double> times,
                                   int n_resamples, double confidence,
                                   RngStream& rng) {
  if (per_path.empty()) throw ParameterError("bootstrap needs per-path data");
  const std::size_t n_paths = per_path.size();
  const std::size_t n_times = times.size();
  for (const auto& row : per_path) {
    if (row.size() != n_times) {
      throw ParameterError("per-path rows must match the time grid");
    }
  }
  if (n_resamples < 2) throw ParameterError("bootstrap needs >= 2 resamples");
  if (!(confidence > 0.0) || !(confidence < 1.0)) {
    throw ParameterError("bootstrap confidence must lie in (0,1)");
  }

  std::vector<double> mean_curve(n_times, 0.0);
  for (const auto& row : per_path) {
    for (std::size_t k = 0; k < n_times; ++k) mean_curve[k] += row[k];
  }
  for (double& v : mean_curve) v /= static_cast<double>(n_paths);
  BootstrapCi out;
  out.point = fit_loglog(times, mean_curve).slope;

  std::vector<double> slopes;
  slopes.reserve(static_cast<std::size_t>(n_resamples));
  std::vector<double> resampled(n_times);
  for (int b = 0; b < n_resamples; ++b) {
    std::fill(resampled.begin(), resampled.end(), 0.0);
    for (std::size_t i = 0; i < n_paths; ++i) {
      const auto pick = static_cast<std::size_t>(
          rng.uniform_open() * static_cast<double>(n_paths));
      const auto& row = per_path[std::min(pick, n_paths - 1)];
      for (std::size_t k = 0; k < n_times; ++k) resampled[k] += row[k];
    }
    for (double& v : resampled) v /= static_cast<double>(n_paths);
    bool positive = true;
    for (double v : resampled) positive = positive && v > 0.0;
    if (!positive) continue;  // resample unusable for a log fit
    slopes.push_back(fit_loglog(times, resampled).slope);
  }
  if (slopes.size() < 2) {
    throw DataError("bootstrap produced too few usable resamples");
  }
  std::sort(slopes.begin(), slopes.end());
  const double tail = 0.5 * (1.0 - confidence);
  const auto idx = [&](double q) {
    const double pos = q * static_cast<double>(slopes.size() - 1);
    return slopes[static_cast<std::size_t>(std::llround(pos))];
  };
  out.lo = idx(tail);
  out.hi = idx(1.0 - tail);
  return out;
}

}  // namespace tcsde
