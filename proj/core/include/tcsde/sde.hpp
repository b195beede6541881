#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "tcsde/grid_path.hpp"
#include "tcsde/rng.hpp"
#include "tcsde/timechange.hpp"

namespace tcsde {

// Which clock drives the linear term A*X: the calendar axis (dt) or the
// operational axis (dE).
enum class LinearClock { natural, operational };

// How the gain-bounded perturbation enters: not at all, as drift against
// the operational clock, or as noise against the time-changed Brownian
// motion.
enum class Perturbation { none, drift_in_clock, diffusion_in_clock_brownian };

// Scalar gain profile tau -> g(tau) >= 0 with closed-form integrals. The
// integrability flags decide which stability hypotheses apply.
struct GFunction {
  enum class Kind { zero, exp_decay, power, compact };

  static GFunction zero();
  static GFunction exp_decay(double c, double a);  // c * exp(-a*tau)
  static GFunction power(double c, double a);      // c * (1+tau)^(-a)
  static GFunction compact(double c, double a);    // c * 1[tau <= a]

  double operator()(double tau) const;
  bool l1_finite() const;       // integral of g over [0, inf)
  double l1() const;            // throws HypothesisError when infinite
  bool l2_finite() const;       // integral of g^2
  double l2() const;            // throws HypothesisError when infinite
  double sup() const { return c; }

  Kind kind = Kind::zero;
  double c = 0.0;
  double a = 0.0;
};

struct SystemSpec {
  Eigen::MatrixXd a;
  LinearClock linear_clock = LinearClock::operational;
  Perturbation perturbation = Perturbation::none;
  GFunction g;
  Eigen::VectorXd x0;
  bool saturating = false;  // f = g*x/(1+|x|) instead of g*x

  Eigen::Index dim() const { return a.rows(); }
  // throws ParameterError on shape mismatches
  void validate() const;
};

// Exponential envelope ||exp(A t)|| <= k_const * exp(-lambda * t), fitted
// from the spectrum with a safety margin and certified on a log time grid.
struct StabilityEnvelope {
  double k_const = 1.0;
  double lambda = 0.0;
  double margin = 0.05;
};

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double t);

// Requires spectral abscissa max Re(sigma(A)) < 0; throws HypothesisError
// otherwise. lambda = |abscissa| * (1 - margin); k_const = 1.01 times the
// sampled supremum of ||exp(At)|| exp(lambda t) over t in {0} and a log
// grid on [1e-3, 1e3].
StabilityEnvelope fit_envelope(const Eigen::MatrixXd& a, double margin = 0.05);

// A vector-valued path on a uniform grid; column k is the state at
// t0 + k*dt.
struct VectorPath {
  double t0 = 0.0;
  double dt = 0.0;
  Eigen::MatrixXd values;  // dim x count

  std::size_t size() const { return static_cast<std::size_t>(values.cols()); }
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  Eigen::VectorXd at(std::size_t k) const {
    return values.col(static_cast<Eigen::Index>(k));
  }
  double norm_at(std::size_t k) const {
    return values.col(static_cast<Eigen::Index>(k)).norm();
  }
};

// Trajectory norm above which integration aborts with BlowUpError.
inline constexpr double kDivergenceGuard = 1e12;

// Euler-Maruyama on the system's own axis (no time change): for drift
// systems Y += (A Y + f) * step, for diffusion systems Y += A Y step
// + f * dB. When brownian_increments is given it supplies dB (one value
// per step, variance step each); otherwise dB is drawn from rng.
VectorPath solve_classical(const SystemSpec& spec, double step,
                           std::size_t n_steps, RngStream& rng,
                           const std::vector<double>* brownian_increments = nullptr);

// Euler stepping of the time-changed system on the joint grid: calendar
// points merged with the clock's crossing times, so every dE increment is
// a single delta and the natural-clock term integrates dt between
// crossings. Flat-clock windows contribute exactly zero to E- and
// B_E-driven terms. When operational_brownian is given (a Brownian path on
// the operational delta-lattice), its increments drive the diffusion term;
// otherwise increments are drawn from rng.
VectorPath solve_time_changed_direct(const SystemSpec& spec,
                                     const TimeChange& tc, RngStream& rng,
                                     const GridPath* operational_brownian = nullptr);

// Duality route: solves the classical system on the operational axis with
// step tc.delta, then composes with the inverse clock by nearest-left
// lattice lookup, X(t) = Y(E_t). Only fully operational systems admit
// this; natural-clock specs raise UnsupportedError.
VectorPath solve_via_duality(const SystemSpec& spec, const TimeChange& tc,
                             RngStream& rng);

}  // namespace tcsde
