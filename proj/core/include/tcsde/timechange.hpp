#pragma once

#include <cstdint>

#include "tcsde/grid_path.hpp"
#include "tcsde/rng.hpp"

namespace tcsde {

// Subordinator path U on the operational grid {n*delta}, with U(0) = 0 and
// independent stationary increments delta^(1/beta) * S_n.
GridPath build_subordinator_path(const StableParams& params, double delta,
                                 double operational_horizon, RngStream& rng);

// Builds a subordinator path long enough that U(last) > calendar_horizon,
// over-provisioning the expected operational length and doubling until the
// calendar horizon is strictly covered.
GridPath build_covering_subordinator_path(const StableParams& params,
                                          double delta,
                                          double calendar_horizon,
                                          RngStream& rng);

// First-passage inverse of a subordinator path, sampled on the calendar
// grid t0 + k*h. The value at calendar time t > 0 is delta times the first
// operational index n with U(n*delta) > t; at t == 0 it is 0 by convention.
// The discrete clock therefore overshoots the continuum inverse by at most
// delta and is nondecreasing on the lattice {m*delta}.
// Throws CoverageError when the path does not strictly cover the last
// calendar point.
GridPath invert_subordinator(const GridPath& u_path, double t0, double h,
                             std::size_t count);

// Brownian motion read through a nondecreasing clock: increments are
// N(0, clock increment), so flat stretches of the clock produce exactly
// zero movement.
GridPath time_changed_brownian(const GridPath& clock, RngStream& rng);

// A subordinator together with its first-passage inverse on a calendar
// grid. delta is the operational step, h the calendar step.
struct TimeChange {
  GridPath u;  // operational axis, strictly increasing
  GridPath e;  // calendar axis, nondecreasing, values on the delta-lattice
  double delta = 0.0;
  double h = 0.0;

  std::size_t calendar_points() const { return e.size(); }
  double calendar_horizon() const { return e.last_time(); }
  // operational index of the clock reading at calendar index k
  std::size_t clock_index(std::size_t k) const;
};

TimeChange make_time_change(const StableParams& params, double delta,
                            double h, double calendar_horizon,
                            RngStream& rng);

// Draws from the exact marginal law of the continuum inverse clock at
// calendar time t: with S a standard positive stable variate,
// (t / S)^beta has the first-passage distribution at t.
double sample_inverse_clock_marginal(const StableParams& params, double t,
                                     RngStream& rng);

}  // namespace tcsde
