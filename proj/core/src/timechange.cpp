#include "tcsde/timechange.hpp"

#include <cmath>
#include <string>

#include "tcsde/errors.hpp"

namespace tcsde {

namespace {

// Expected value of the continuum inverse clock at calendar time t is
// t^beta / Gamma(1+beta); used only to size the initial over-provision.
double expected_operational_length(double beta, double calendar_horizon) {
  return std::pow(calendar_horizon, beta) / std::tgamma(1.0 + beta);
}

constexpr double kOverProvision = 4.0;
constexpr std::size_t kMaxPathPoints = std::size_t{1} << 31;

}  // namespace

void require_strictly_increasing_from_zero(const GridPath& path) {
  if (path.empty() || path.values.front() != 0.0) {
    throw ParameterError("subordinator path must start at U(0) = 0");
  }
  for (std::size_t n = 1; n < path.size(); ++n) {
    if (!(path.values[n] > path.values[n - 1])) {
      throw ParameterError("subordinator path must be strictly increasing");
    }
  }
}

void require_nondecreasing(const GridPath& path) {
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path.values[k] < path.values[k - 1]) {
      throw ParameterError("clock path must be nondecreasing");
    }
  }
}

GridPath build_subordinator_path(const StableParams& params, double delta,
                                 double operational_horizon, RngStream& rng) {
  if (!(delta > 0.0)) throw ParameterError("operational step must be > 0");
  if (!(operational_horizon >= delta)) {
    throw ParameterError("operational horizon must cover at least one step");
  }
  const auto steps =
      static_cast<std::size_t>(std::ceil(operational_horizon / delta - 1e-9));
  GridPath path;
  path.t0 = 0.0;
  path.dt = delta;
  path.kind = PathKind::subordinator;
  path.values.resize(steps + 1);
  path.values[0] = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    path.values[n] = path.values[n - 1] + rng.stable_increment(params, delta);
  }
  return path;
}

GridPath build_covering_subordinator_path(const StableParams& params,
                                          double delta,
                                          double calendar_horizon,
                                          RngStream& rng) {
  if (!(delta > 0.0)) throw ParameterError("operational step must be > 0");
  if (!(calendar_horizon > 0.0)) throw ParameterError("calendar horizon must be > 0");
  const double expected =
      expected_operational_length(params.beta, calendar_horizon);
  auto steps = static_cast<std::size_t>(
      std::ceil(kOverProvision * expected / delta)) + 1;
  GridPath path;
  path.t0 = 0.0;
  path.dt = delta;
  path.kind = PathKind::subordinator;
  path.values.reserve(steps + 1);
  path.values.push_back(0.0);
  while (path.values.back() <= calendar_horizon) {
    if (path.values.size() > kMaxPathPoints) {
      throw BudgetError("covering subordinator path exceeded " +
                        std::to_string(kMaxPathPoints) + " points");
    }
    while (path.values.size() <= steps) {
      path.values.push_back(path.values.back() +
                            rng.stable_increment(params, delta));
      if (path.values.back() > calendar_horizon) break;
    }
    steps *= 2;  // horizon still not crossed: double the provision
  }
  return path;
}

GridPath invert_subordinator(const GridPath& u_path, double t0, double h,
                             std::size_t count) {
  require_strictly_increasing_from_zero(u_path);
  if (!(h > 0.0)) throw ParameterError("calendar step must be > 0");
  if (t0 < 0.0) throw ParameterError("calendar origin must be >= 0");
  if (count == 0) throw ParameterError("calendar grid must be nonempty");
  const double delta = u_path.dt;
  GridPath clock;
  clock.t0 = t0;
  clock.dt = h;
  clock.kind = PathKind::inverse_clock;
  clock.values.resize(count);
  std::size_t n = 1;  // candidate first-passage index, always >= 1
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    if (t == 0.0) {
      clock.values[k] = 0.0;
      continue;
    }
    while (n < u_path.size() && u_path.values[n] <= t) ++n;
    if (n == u_path.size()) {
      throw CoverageError(
          "subordinator path ends at " + std::to_string(u_path.back()) +
          " and does not cover calendar time " + std::to_string(t) +
          "; extend the operational horizon");
    }
    clock.values[k] = static_cast<double>(n) * delta;
  }
  return clock;
}

GridPath time_changed_brownian(const GridPath& clock, RngStream& rng) {
  require_nondecreasing(clock);
  if (clock.empty()) throw ParameterError("clock path must be nonempty");
  GridPath b;
  b.t0 = clock.t0;
  b.dt = clock.dt;
  b.kind = PathKind::brownian;
  b.values.resize(clock.size());
  b.values[0] = 0.0;
  for (std::size_t k = 1; k < clock.size(); ++k) {
    const double dclock = clock.values[k] - clock.values[k - 1];
    b.values[k] = b.values[k - 1] + rng.gaussian(dclock);
  }
  return b;
}

std::size_t TimeChange::clock_index(std::size_t k) const {
  return static_cast<std::size_t>(std::llround(e.values[k] / delta));
}

TimeChange make_time_change(const StableParams& params, double delta,
                            double h, double calendar_horizon,
                            RngStream& rng) {
  TimeChange tc;
  tc.delta = delta;
  tc.h = h;
  tc.u = build_covering_subordinator_path(params, delta, calendar_horizon, rng);
  const auto count =
      static_cast<std::size_t>(std::llround(calendar_horizon / h)) + 1;
  tc.e = invert_subordinator(tc.u, 0.0, h, count);
  return tc;
}

double sample_inverse_clock_marginal(const StableParams& params, double t,
                                     RngStream& rng) {
  if (!(t >= 0.0)) throw ParameterError("calendar time must be >= 0");
  if (t == 0.0) return 0.0;
  const double s = rng.stable_increment(params, 1.0);
  return std::pow(t / s, params.beta);
}

}  // namespace tcsde
