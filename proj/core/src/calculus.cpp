#include "tcsde/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tcsde/errors.hpp"
#include "tcsde/stats.hpp"

namespace tcsde {

namespace {

// Brownian motion on the operational lattice of tc, one value per lattice
// point of the subordinator path.
std::vector<double> operational_brownian(const TimeChange& tc,
                                         RngStream& rng) {
  std::vector<double> w(tc.u.size());
  w[0] = 0.0;
  for (std::size_t j = 1; j < w.size(); ++j) {
    w[j] = w[j - 1] + rng.gaussian(tc.delta);
  }
  return w;
}

template <typename PerPathFn>
ResidualReport run_ladder(CheckKind kind, const RefinementLadder& ladder,
                          const PerPathFn& residual_of) {
  if (ladder.rungs < 1) throw ParameterError("ladder needs >= 1 rung");
  if (ladder.paths_per_rung < 1) {
    throw ParameterError("ladder needs >= 1 path per rung");
  }
  ResidualReport report;
  report.kind = kind;
  const StableParams params(ladder.beta);
  std::uint64_t stream = ladder.stream_base;
  for (int r = 0; r < ladder.rungs; ++r) {
    const double scale = std::pow(0.5, r);
    const double h = ladder.h0 * scale;
    const double delta = ladder.delta0 * scale;
    double acc = 0.0;
    for (int p = 0; p < ladder.paths_per_rung; ++p) {
      RngStream rng(ladder.seed, stream++);
      const TimeChange tc =
          make_time_change(params, delta, h, ladder.horizon, rng);
      acc += residual_of(tc, rng);
    }
    report.grid_steps.emplace_back(h, delta);
    report.max_abs_residual.push_back(acc / ladder.paths_per_rung);
  }
  if (ladder.rungs >= 3) {
    std::vector<double> hs, res;
    for (int r = 0; r < ladder.rungs; ++r) {
      hs.push_back(std::log(report.grid_steps[r].first));
      res.push_back(std::log(std::max(report.max_abs_residual[r], 1e-300)));
    }
    report.fitted_order = fit_line(hs, res).slope;
  }
  return report;
}

}  // namespace

const char* check_kind_name(CheckKind kind) {
  switch (kind) {
    case CheckKind::change_of_variable_1:
      return "change_of_variable_1";
    case CheckKind::change_of_variable_2:
      return "change_of_variable_2";
    case CheckKind::gronwall_bound:
      return "gronwall_bound";
    case CheckKind::ito_identity:
      return "ito_identity";
  }
  return "unknown";
}

double change_of_variable_1_residual(const TimeChange& tc, const ScalarFn& mu,
                                     const ScalarFn& sigma, RngStream& rng) {
  const std::vector<double> w = operational_brownian(tc, rng);
  const double delta = tc.delta;
  double max_residual = 0.0;
  double rhs = 0.0;          // clock-driven sums over the calendar axis
  double lhs = 0.0;          // operational sums up to the clock reading
  std::size_t j = 0;         // operational prefix index
  std::size_t n_prev = tc.clock_index(0);
  for (std::size_t k = 0; k < tc.calendar_points(); ++k) {
    const std::size_t n_k = tc.clock_index(k);
    for (; j < n_k; ++j) {
      const double s = static_cast<double>(j) * delta;
      lhs += mu(s) * delta + sigma(s) * (w[j + 1] - w[j]);
    }
    if (k > 0) {
      const double e_prev = static_cast<double>(n_prev) * delta;
      rhs += mu(e_prev) * (static_cast<double>(n_k - n_prev) * delta) +
             sigma(e_prev) * (w[n_k] - w[n_prev]);
    }
    n_prev = n_k;
    max_residual = std::max(max_residual, std::abs(lhs - rhs));
  }
  return max_residual;
}

double change_of_variable_2_residual(const TimeChange& tc, const ScalarFn& mu,
                                     const ScalarFn& sigma, RngStream& rng) {
  const std::vector<double> w = operational_brownian(tc, rng);
  const double delta = tc.delta;
  double max_residual = 0.0;
  double lhs = 0.0;  // mu dE + sigma dB_E over the calendar axis
  double rhs = 0.0;  // mu(U(s-)) ds + sigma(U(s-)) dB over [0, E_t]
  std::size_t j = 0;
  std::size_t n_prev = tc.clock_index(0);
  for (std::size_t k = 0; k < tc.calendar_points(); ++k) {
    const std::size_t n_k = tc.clock_index(k);
    for (; j < n_k; ++j) {
      const double u_left = tc.u.values[j];
      rhs += mu(u_left) * delta + sigma(u_left) * (w[j + 1] - w[j]);
    }
    if (k > 0) {
      const double t_prev = tc.e.time_at(k - 1);
      lhs += mu(t_prev) * (static_cast<double>(n_k - n_prev) * delta) +
             sigma(t_prev) * (w[n_k] - w[n_prev]);
    }
    n_prev = n_k;
    max_residual = std::max(max_residual, std::abs(lhs - rhs));
  }
  return max_residual;
}

ResidualReport check_change_of_variable_1(const RefinementLadder& ladder,
                                          const ScalarFn& mu,
                                          const ScalarFn& sigma) {
  return run_ladder(CheckKind::change_of_variable_1, ladder,
                    [&](const TimeChange& tc, RngStream& rng) {
                      return change_of_variable_1_residual(tc, mu, sigma, rng);
                    });
}

ResidualReport check_change_of_variable_2(const RefinementLadder& ladder,
                                          const ScalarFn& mu,
                                          const ScalarFn& sigma) {
  return run_ladder(CheckKind::change_of_variable_2, ladder,
                    [&](const TimeChange& tc, RngStream& rng) {
                      return change_of_variable_2_residual(tc, mu, sigma, rng);
                    });
}

GronwallResult check_gronwall(double u0, const ScalarFn& k_fn,
                              const TimeChange& tc) {
  if (!(u0 >= 0.0)) throw ParameterError("initial bound must be >= 0");
  GronwallResult out;
  out.margin.reserve(tc.calendar_points());
  double x = u0;
  double k_integral = 0.0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t n_prev = tc.clock_index(0);
  for (std::size_t k = 0; k < tc.calendar_points(); ++k) {
    if (k > 0) {
      const double t_prev = tc.e.time_at(k - 1);
      const double k_val = k_fn(t_prev);
      if (!(k_val >= 0.0)) {
        throw ParameterError("Gronwall gain must be nonnegative");
      }
      const std::size_t n_k = tc.clock_index(k);
      const double de = static_cast<double>(n_k - n_prev) * tc.delta;
      x += k_val * x * de;
      k_integral += k_val * de;
      n_prev = n_k;
    }
    const double bound = u0 * std::exp(k_integral);
    const double margin = bound - x;
    out.margin.push_back(margin);
    min_margin = std::min(min_margin, margin);
  }
  out.min_margin = min_margin;
  out.pass = min_margin >= 0.0;
  return out;
}

double ItoFunction::value(double t1, double t2, double x) const {
  switch (kind) {
    case Kind::linear:
      return x;
    case Kind::exp_clock:
      return std::exp(t2) * x;
    case Kind::exp_calendar:
      return std::exp(-coeff * t1) * x;
    case Kind::quadratic:
      return coeff * x * x;
  }
  return 0.0;
}

double ItoFunction::d_t1(double t1, double t2, double x) const {
  switch (kind) {
    case Kind::exp_calendar:
      return -coeff * std::exp(-coeff * t1) * x;
    default:
      (void)t2;
      (void)x;
      return 0.0;
  }
}

double ItoFunction::d_t2(double t1, double t2, double x) const {
  switch (kind) {
    case Kind::exp_clock:
      return std::exp(t2) * x;
    default:
      (void)t1;
      return 0.0;
  }
}

double ItoFunction::d_x(double t1, double t2, double x) const {
  switch (kind) {
    case Kind::linear:
      return 1.0;
    case Kind::exp_clock:
      return std::exp(t2);
    case Kind::exp_calendar:
      return std::exp(-coeff * t1);
    case Kind::quadratic:
      return 2.0 * coeff * x;
  }
  return 0.0;
}

double ItoFunction::d_xx(double t1, double t2, double x) const {
  (void)t1;
  (void)t2;
  (void)x;
  return kind == Kind::quadratic ? 2.0 * coeff : 0.0;
}

double ito_identity_residual(const ItoFunction& f, const ItoProcess& process,
                             const TimeChange& tc, RngStream& rng) {
  if (!process.p || !process.phi || !process.psi) {
    throw ParameterError("process needs p, phi and psi evaluators");
  }
  const std::vector<double> w = operational_brownian(tc, rng);
  const double delta = tc.delta;
  double x = process.x0;
  double rhs = 0.0;
  double max_residual = 0.0;
  std::size_t n = tc.clock_index(0);
  const double f0 = f.value(tc.e.t0, static_cast<double>(n) * delta, x);
  for (std::size_t k = 0; k + 1 < tc.calendar_points(); ++k) {
    const double t_left = tc.e.time_at(k);
    const double t_right = tc.e.time_at(k + 1);
    const std::size_t n_next = tc.clock_index(k + 1);
    double s = t_left;
    for (; n < n_next; ++n) {
      const double tau = std::min(std::max(tc.u.values[n], t_left), t_right);
      const double e_reading = static_cast<double>(n) * delta;
      // dt piece up to the crossing
      if (tau > s) {
        const double p_val = process.p(s, e_reading, x);
        rhs += f.d_t1(s, e_reading, x) * (tau - s) +
               f.d_x(s, e_reading, x) * p_val * (tau - s);
        x += p_val * (tau - s);
        s = tau;
      }
      // the crossing itself: dE = delta, dB_E = lattice increment
      const double db = w[n + 1] - w[n];
      const double phi_val = process.phi(s, e_reading, x);
      const double psi_val = process.psi(s, e_reading, x);
      rhs += f.d_t2(s, e_reading, x) * delta +
             f.d_x(s, e_reading, x) * (phi_val * delta + psi_val * db) +
             0.5 * f.d_xx(s, e_reading, x) * psi_val * psi_val * delta;
      x += phi_val * delta + psi_val * db;
    }
    if (t_right > s) {
      const double e_reading = static_cast<double>(n) * delta;
      const double p_val = process.p(s, e_reading, x);
      rhs += f.d_t1(s, e_reading, x) * (t_right - s) +
             f.d_x(s, e_reading, x) * p_val * (t_right - s);
      x += p_val * (t_right - s);
    }
    const double lhs =
        f.value(t_right, static_cast<double>(n) * delta, x) - f0;
    max_residual = std::max(max_residual, std::abs(lhs - rhs));
  }
  return max_residual;
}

ResidualReport check_ito_formula(const RefinementLadder& ladder,
                                 const ItoFunction& f,
                                 const ItoProcess& process) {
  return run_ladder(CheckKind::ito_identity, ladder,
                    [&](const TimeChange& tc, RngStream& rng) {
                      return ito_identity_residual(f, process, tc, rng);
                    });
}

}  // namespace tcsde
