#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "tcsde/rng.hpp"
#include "tcsde/timechange.hpp"

namespace tcsde {

enum class CheckKind {
  change_of_variable_1,
  change_of_variable_2,
  gronwall_bound,
  ito_identity,
};

const char* check_kind_name(CheckKind kind);

// Residuals of one identity across a grid-refinement ladder. Each entry is
// the pathwise maximum residual over the calendar grid, averaged across
// the paths of that rung. fitted_order is the least-squares slope of
// log(residual) against log(h), present only with >= 3 rungs.
struct ResidualReport {
  CheckKind kind{};
  std::vector<std::pair<double, double>> grid_steps;  // (h, delta)
  std::vector<double> max_abs_residual;
  std::optional<double> fitted_order;
};

// Base grid of a refinement ladder; rung r uses (h0, delta0) / 2^r with
// paths_per_rung independent clock and noise realizations.
struct RefinementLadder {
  double beta = 0.5;
  double h0 = 0.02;
  double delta0 = 0.02;
  int rungs = 4;
  int paths_per_rung = 8;
  double horizon = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
};

using ScalarFn = std::function<double(double)>;

// Single-path residual of the first change-of-variable identity on a given
// time change: integrals of mu ds + sigma dB over [0, E_t] on the
// operational axis against the corresponding clock-driven integrals over
// [0, t], sharing one operational Brownian path drawn from rng.
double change_of_variable_1_residual(const TimeChange& tc, const ScalarFn& mu,
                                     const ScalarFn& sigma, RngStream& rng);

// Single-path residual of the second identity: mu dE + sigma dB_E over
// [0, t] against integrals of mu(U(s-)) on the operational axis, with
// U(s-) read as the nearest-left lattice value.
double change_of_variable_2_residual(const TimeChange& tc, const ScalarFn& mu,
                                     const ScalarFn& sigma, RngStream& rng);

ResidualReport check_change_of_variable_1(const RefinementLadder& ladder,
                                          const ScalarFn& mu,
                                          const ScalarFn& sigma);

ResidualReport check_change_of_variable_2(const RefinementLadder& ladder,
                                          const ScalarFn& mu,
                                          const ScalarFn& sigma);

struct GronwallResult {
  bool pass = false;
  double min_margin = 0.0;
  std::vector<double> margin;  // bound minus iterate, per calendar point
};

// Drives the equality-case recursion x += K x dE along the clock and
// asserts x(t) <= u0 * exp(integral of K dE) pointwise, with no grid
// tolerance: the discrete inequality holds exactly, so any violation is a
// bug, not discretization error.
GronwallResult check_gronwall(double u0, const ScalarFn& k_fn,
                              const TimeChange& tc);

// Test functions F(t1, t2, x) with the closed-form partials the identity
// check needs. t1 is calendar time, t2 the clock reading.
struct ItoFunction {
  enum class Kind {
    linear,        // x
    exp_clock,     // exp(t2) * x
    exp_calendar,  // exp(-coeff * t1) * x
    quadratic,     // coeff * x^2
  };
  Kind kind = Kind::linear;
  double coeff = 1.0;

  double value(double t1, double t2, double x) const;
  double d_t1(double t1, double t2, double x) const;
  double d_t2(double t1, double t2, double x) const;
  double d_x(double t1, double t2, double x) const;
  double d_xx(double t1, double t2, double x) const;
};

// Scalar integrator data for dX = p ds + phi dE + psi dB_E; arguments are
// (calendar s, clock reading, state).
struct ItoProcess {
  std::function<double(double, double, double)> p;
  std::function<double(double, double, double)> phi;
  std::function<double(double, double, double)> psi;
  double x0 = 0.0;
};

// Single-path residual of the time-changed Ito identity: F along the
// simulated path against the six left-point integral terms (including the
// half psi^2 F_xx dE correction), all on the joint calendar-crossing grid
// with shared noise.
double ito_identity_residual(const ItoFunction& f, const ItoProcess& process,
                             const TimeChange& tc, RngStream& rng);

ResidualReport check_ito_formula(const RefinementLadder& ladder,
                                 const ItoFunction& f,
                                 const ItoProcess& process);

}  // namespace tcsde
