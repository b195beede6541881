#include <cmath>
#include <vector>

#include <doctest.h>

#include "tcsde/errors.hpp"
#include "tcsde/stats.hpp"

using namespace tcsde;

TEST_SUITE("stats") {

TEST_CASE("sample mean and standard error") {
  const std::vector<double> sample = {1.0, 2.0, 3.0, 4.0};
  const MeanSe m = mean_se(sample);
  CHECK(m.mean == doctest::Approx(2.5).epsilon(1e-15));
  // sample variance 5/3; se = sqrt(5/3)/2
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-14));
  CHECK(m.n == 4);
  CHECK_THROWS_AS(static_cast<void>(mean_se(std::vector<double>{})),
                  ParameterError);
}

TEST_CASE("two-sample distribution test calibration") {
  RngStream rng(1, 0);
  const int n = 5000;
  std::vector<double> a(n), b(n), shifted(n);
  for (int i = 0; i < n; ++i) {
    a[i] = rng.standard_normal();
    b[i] = rng.standard_normal();
    shifted[i] = b[i] + 1.0;
  }
  const KsResult same = ks_two_sample(a, b, 0.01);
  CHECK(same.accept);
  CHECK(same.statistic <= same.critical);

  const KsResult diff = ks_two_sample(a, shifted, 0.01);
  CHECK(!diff.accept);
  CHECK(diff.statistic > 2.0 * diff.critical);
}

TEST_CASE("distribution test critical value") {
  std::vector<double> a(100), b(100);
  for (int i = 0; i < 100; ++i) {
    a[i] = i;
    b[i] = i + 0.5;
  }
  const KsResult r = ks_two_sample(a, b, 0.01);
  const double c = std::sqrt(-std::log(0.005) / 2.0);
  CHECK(r.critical == doctest::Approx(c * std::sqrt(200.0 / 10000.0))
                          .epsilon(1e-12));
}

TEST_CASE("distribution test on disjoint samples saturates") {
  std::vector<double> a(50), b(50);
  for (int i = 0; i < 50; ++i) {
    a[i] = i;
    b[i] = 1000 + i;
  }
  const KsResult r = ks_two_sample(a, b, 0.05);
  CHECK(r.statistic == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!r.accept);
}

TEST_CASE("line fits recover exact coefficients") {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> y;
  for (const double v : x) y.push_back(3.0 - 2.0 * v);
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(f.residual_ss < 1e-20);
  CHECK(f.n == 5);
}

TEST_CASE("log-log fit recovers a power law") {
  const std::vector<double> x = {0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (const double v : x) y.push_back(4.0 * std::pow(v, -1.5));
  const LineFit f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("semilog fit recovers an exponential rate") {
  const std::vector<double> x = {0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> y;
  for (const double v : x) y.push_back(7.0 * std::exp(-2.0 * v));
  const LineFit f = fit_semilog(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("log fits reject nonpositive data") {
  const std::vector<double> x = {1.0, 2.0, 3.0};
  const std::vector<double> bad = {1.0, 0.0, 2.0};
  const std::vector<double> good = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(static_cast<void>(fit_loglog(x, bad)), DataError);
  CHECK_THROWS_AS(static_cast<void>(fit_semilog(x, bad)), DataError);
  const std::vector<double> bad_x = {-1.0, 2.0, 3.0};
  CHECK_THROWS_AS(static_cast<void>(fit_loglog(bad_x, good)), DataError);
  const std::vector<double> two_x = {1.0};
  const std::vector<double> two_y = {1.0};
  CHECK_THROWS_AS(static_cast<void>(fit_line(two_x, two_y)), ParameterError);
}

TEST_CASE("bootstrap interval brackets a known slope") {
  // noisy per-path curves around t^-2: the fitted slope fluctuates with
  // the resampled paths, so the interval is nondegenerate and should still
  // bracket the true exponent
  RngStream rng(2, 0);
  const std::vector<double> times = {1.0, 2.0, 4.0, 8.0};
  std::vector<std::vector<double>> per_path;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> row;
    for (const double t : times) {
      row.push_back(std::exp(0.3 * rng.standard_normal()) / (t * t));
    }
    per_path.push_back(std::move(row));
  }
  RngStream boot(2, 1);
  const BootstrapCi ci =
      bootstrap_loglog_slope(per_path, times, 400, 0.95, boot);
  INFO("slope ", ci.point, " interval [", ci.lo, ", ", ci.hi, "]");
  CHECK(std::abs(ci.point + 2.0) < 0.06);
  CHECK(ci.lo <= ci.point);
  CHECK(ci.point <= ci.hi);
  CHECK(ci.lo < ci.hi);
  CHECK(ci.hi - ci.lo < 0.2);
  CHECK(ci.lo <= -2.0);
  CHECK(ci.hi >= -2.0);
}

}  // TEST_SUITE
