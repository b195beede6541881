#include "tcsde/sde.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "tcsde/errors.hpp"

namespace tcsde {

namespace {

// One Euler update shared by every solver so that solver pairs that should
// agree pathwise produce bitwise-identical arithmetic:
//   x += (A x) * lin_weight + f(g_arg, x) * pert_weight.
class EulerKernel {
 public:
  explicit EulerKernel(const SystemSpec& spec)
      : a_(spec.a),
        g_(spec.g),
        saturating_(spec.saturating),
        has_pert_(spec.perturbation != Perturbation::none),
        ax_(spec.dim()),
        f_(spec.dim()) {}

  void step(Eigen::VectorXd& x, double lin_weight, double g_arg,
            double pert_weight) {
    ax_.noalias() = a_ * x;
    if (has_pert_ && pert_weight != 0.0) {
      double scale = g_(g_arg);
      if (saturating_) scale /= 1.0 + x.norm();
      f_.noalias() = x * scale;
      x += ax_ * lin_weight + f_ * pert_weight;
    } else {
      x += ax_ * lin_weight;
    }
  }

 private:
  const Eigen::MatrixXd& a_;
  const GFunction& g_;
  bool saturating_;
  bool has_pert_;
  Eigen::VectorXd ax_;
  Eigen::VectorXd f_;
};

void check_guard(const Eigen::VectorXd& x, double t) {
  if (!(x.squaredNorm() <= kDivergenceGuard * kDivergenceGuard)) {
    throw BlowUpError("trajectory norm exceeded 1e12 near time " +
                      std::to_string(t));
  }
}

}  // namespace

GFunction GFunction::zero() { return GFunction{}; }

GFunction GFunction::exp_decay(double c, double a) {
  if (!(c >= 0.0) || !(a > 0.0)) {
    throw ParameterError("exp_decay gain needs c >= 0 and a > 0");
  }
  return GFunction{Kind::exp_decay, c, a};
}

GFunction GFunction::power(double c, double a) {
  if (!(c >= 0.0) || !(a > 0.0)) {
    throw ParameterError("power gain needs c >= 0 and a > 0");
  }
  return GFunction{Kind::power, c, a};
}

GFunction GFunction::compact(double c, double a) {
  if (!(c >= 0.0) || !(a > 0.0)) {
    throw ParameterError("compact gain needs c >= 0 and a > 0");
  }
  return GFunction{Kind::compact, c, a};
}

double GFunction::operator()(double tau) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::exp_decay:
      return c * std::exp(-a * tau);
    case Kind::power:
      return c * std::pow(1.0 + tau, -a);
    case Kind::compact:
      return tau <= a ? c : 0.0;
  }
  return 0.0;
}

bool GFunction::l1_finite() const {
  switch (kind) {
    case Kind::zero:
    case Kind::exp_decay:
    case Kind::compact:
      return true;
    case Kind::power:
      return a > 1.0;
  }
  return false;
}

double GFunction::l1() const {
  if (!l1_finite()) {
    throw HypothesisError("gain is not integrable on [0, inf)");
  }
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::exp_decay:
      return c / a;
    case Kind::power:
      return c / (a - 1.0);
    case Kind::compact:
      return c * a;
  }
  return 0.0;
}

bool GFunction::l2_finite() const {
  switch (kind) {
    case Kind::zero:
    case Kind::exp_decay:
    case Kind::compact:
      return true;
    case Kind::power:
      return a > 0.5;
  }
  return false;
}

double GFunction::l2() const {
  if (!l2_finite()) {
    throw HypothesisError("gain is not square-integrable on [0, inf)");
  }
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::exp_decay:
      return c * c / (2.0 * a);
    case Kind::power:
      return c * c / (2.0 * a - 1.0);
    case Kind::compact:
      return c * c * a;
  }
  return 0.0;
}

void SystemSpec::validate() const {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw ParameterError("system matrix must be square and nonempty");
  }
  if (x0.size() != a.rows()) {
    throw ParameterError("initial state dimension must match the matrix");
  }
  if (!a.allFinite() || !x0.allFinite()) {
    throw ParameterError("system matrix and initial state must be finite");
  }
}

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a, double t) {
  if (!a.allFinite() || !std::isfinite(t)) {
    throw ParameterError("matrix exponential needs finite input");
  }
  Eigen::MatrixXd result = (a * t).exp();
  if (!result.allFinite()) {
    throw RangeError("matrix exponential overflowed double range");
  }
  return result;
}

StabilityEnvelope fit_envelope(const Eigen::MatrixXd& a, double margin) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw ParameterError("envelope fit needs a square matrix");
  }
  if (!(margin > 0.0) || !(margin < 1.0)) {
    throw ParameterError("envelope margin must lie in (0,1)");
  }
  const Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) {
    throw ParameterError("eigenvalue computation failed");
  }
  const double abscissa = es.eigenvalues().real().maxCoeff();
  if (!(abscissa < 0.0)) {
    throw HypothesisError(
        "spectral abscissa is " + std::to_string(abscissa) +
        "; the stability checks require Re(sigma(A)) < 0");
  }
  StabilityEnvelope env;
  env.margin = margin;
  env.lambda = -abscissa * (1.0 - margin);
  // sup of ||exp(At)|| e^(lambda t) over {0} and a log grid; the margin
  // guarantees the product decays eventually, so the grid sees the peak
  double sup = 1.0;  // t = 0 gives exactly 1
  const int grid_points = 400;
  for (int i = 0; i <= grid_points; ++i) {
    const double t = std::pow(10.0, -3.0 + 6.0 * i / grid_points);
    const Eigen::MatrixXd e_at = matrix_exponential(a, t);
    const double norm = e_at.jacobiSvd().singularValues()(0);
    sup = std::max(sup, norm * std::exp(env.lambda * t));
  }
  env.k_const = 1.01 * sup;
  return env;
}

VectorPath solve_classical(const SystemSpec& spec, double step,
                           std::size_t n_steps, RngStream& rng,
                           const std::vector<double>* brownian_increments) {
  spec.validate();
  if (!(step > 0.0)) throw ParameterError("step must be > 0");
  const bool diffusion =
      spec.perturbation == Perturbation::diffusion_in_clock_brownian;
  if (brownian_increments && brownian_increments->size() < n_steps) {
    throw ParameterError("supplied Brownian increments are too short");
  }
  VectorPath path;
  path.t0 = 0.0;
  path.dt = step;
  path.values.resize(spec.dim(), static_cast<Eigen::Index>(n_steps + 1));
  Eigen::VectorXd y = spec.x0;
  path.values.col(0) = y;
  EulerKernel kernel(spec);
  for (std::size_t j = 0; j < n_steps; ++j) {
    const double t = static_cast<double>(j) * step;
    double pert_weight = 0.0;
    if (spec.perturbation == Perturbation::drift_in_clock) {
      pert_weight = step;
    } else if (diffusion) {
      pert_weight =
          brownian_increments ? (*brownian_increments)[j] : rng.gaussian(step);
    }
    kernel.step(y, step, t, pert_weight);
    check_guard(y, t + step);
    path.values.col(static_cast<Eigen::Index>(j + 1)) = y;
  }
  return path;
}

VectorPath solve_time_changed_direct(const SystemSpec& spec,
                                     const TimeChange& tc, RngStream& rng,
                                     const GridPath* operational_brownian) {
  spec.validate();
  const std::size_t n_cal = tc.calendar_points();
  if (n_cal == 0) throw ParameterError("time change has an empty calendar grid");
  const bool natural = spec.linear_clock == LinearClock::natural;
  const bool diffusion =
      spec.perturbation == Perturbation::diffusion_in_clock_brownian;
  const double delta = tc.delta;
  if (operational_brownian &&
      operational_brownian->size() <= tc.clock_index(n_cal - 1)) {
    throw ParameterError("operational Brownian path is too short");
  }
  VectorPath path;
  path.t0 = tc.e.t0;
  path.dt = tc.h;
  path.values.resize(spec.dim(), static_cast<Eigen::Index>(n_cal));
  Eigen::VectorXd x = spec.x0;
  path.values.col(0) = x;
  EulerKernel kernel(spec);
  std::size_t n = tc.clock_index(0);
  for (std::size_t k = 0; k + 1 < n_cal; ++k) {
    const double t_left = tc.e.time_at(k);
    const double t_right = tc.e.time_at(k + 1);
    const std::size_t n_next = tc.clock_index(k + 1);
    double s = t_left;
    for (; n < n_next; ++n) {
      // crossing time of level n*delta, clipped into the window (only the
      // artificial first crossing at the calendar origin gets clipped)
      const double tau =
          std::min(std::max(tc.u.values[n], t_left), t_right);
      const double e_reading = static_cast<double>(n) * delta;
      double pert_weight = delta;
      if (diffusion) {
        pert_weight = operational_brownian
                          ? operational_brownian->values[n + 1] -
                                operational_brownian->values[n]
                          : rng.gaussian(delta);
      }
      if (natural) {
        // accrue the dt-driven linear term up to the crossing, then apply
        // the dE-driven perturbation alone
        kernel.step(x, tau - s, e_reading, 0.0);
        kernel.step(x, 0.0, e_reading, pert_weight);
      } else {
        kernel.step(x, delta, e_reading, pert_weight);
      }
      s = tau;
      check_guard(x, tau);
    }
    if (natural) kernel.step(x, t_right - s, 0.0, 0.0);
    check_guard(x, t_right);
    path.values.col(static_cast<Eigen::Index>(k + 1)) = x;
  }
  return path;
}

VectorPath solve_via_duality(const SystemSpec& spec, const TimeChange& tc,
                             RngStream& rng) {
  spec.validate();
  if (spec.linear_clock != LinearClock::operational) {
    throw UnsupportedError(
        "duality composition needs every term on the operational clock");
  }
  const std::size_t n_cal = tc.calendar_points();
  if (n_cal == 0) throw ParameterError("time change has an empty calendar grid");
  const std::size_t n_max = tc.clock_index(n_cal - 1);
  const VectorPath dual = solve_classical(spec, tc.delta, n_max, rng);
  VectorPath path;
  path.t0 = tc.e.t0;
  path.dt = tc.h;
  path.values.resize(spec.dim(), static_cast<Eigen::Index>(n_cal));
  for (std::size_t k = 0; k < n_cal; ++k) {
    path.values.col(static_cast<Eigen::Index>(k)) =
        dual.values.col(static_cast<Eigen::Index>(tc.clock_index(k)));
  }
  return path;
}

}  // namespace tcsde
