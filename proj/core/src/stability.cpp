#include "tcsde/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tcsde/errors.hpp"
#include "tcsde/mittag_leffler.hpp"
#include "tcsde/parallel.hpp"
#include "tcsde/stats.hpp"

namespace tcsde {

namespace {

double vector_norm_p(double norm, double p) { return std::pow(norm, p); }

std::vector<std::size_t> observation_indices(const std::vector<double>& times,
                                             double h, double horizon) {
  std::vector<std::size_t> idx;
  idx.reserve(times.size());
  for (double t : times) {
    if (t < 0.0 || t > horizon * (1.0 + 1e-12)) {
      throw ParameterError("observation time outside the simulated horizon");
    }
    idx.push_back(static_cast<std::size_t>(std::llround(t / h)));
  }
  return idx;
}

double matrix_two_norm(const Eigen::MatrixXd& a) {
  return a.jacobiSvd().singularValues()(0);
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::not_applicable:
      return "not_applicable";
  }
  return "unknown";
}

void ExperimentDesign::validate() const {
  system.validate();
  StableParams check_beta(beta);  // validates the range
  (void)check_beta;
  if (n_paths < 100) throw ParameterError("ensemble needs n_paths >= 100");
  if (!(h > 0.0) || !(delta > 0.0) || !(horizon > 0.0)) {
    throw ParameterError("grid steps and horizon must be > 0");
  }
  for (double p : p_values) {
    if (!(p > 0.0)) throw ParameterError("moment orders must be > 0");
  }
  if (p_values.empty()) throw ParameterError("at least one moment order required");
}

std::vector<double> make_observation_grid(double horizon, double h) {
  if (!(horizon > 0.0) || !(h > 0.0)) {
    throw ParameterError("grid needs horizon > 0 and h > 0");
  }
  std::vector<double> raw{0.0};
  const double ramp_end = std::min(1.0, horizon);
  for (int i = 1; i <= 8; ++i) raw.push_back(ramp_end * i / 8.0);
  if (horizon > 1.0) {
    const int per_decade = 6;
    const double decades = std::log10(horizon);
    const int steps = static_cast<int>(std::ceil(decades * per_decade));
    for (int i = 1; i <= steps; ++i) {
      raw.push_back(std::pow(10.0, decades * i / steps));
    }
  }
  std::vector<double> snapped;
  for (double t : raw) {
    double s = std::round(t / h) * h;
    s = std::min(s, horizon);
    if (s < 0.0) s = 0.0;
    snapped.push_back(s);
  }
  std::sort(snapped.begin(), snapped.end());
  snapped.erase(std::unique(snapped.begin(), snapped.end()), snapped.end());
  return snapped;
}

EnsembleResult run_ensemble(const ExperimentDesign& design) {
  ExperimentDesign d = design;
  d.validate();
  if (d.observation_times.empty()) {
    d.observation_times = make_observation_grid(d.horizon, d.h);
  }
  const auto idx = observation_indices(d.observation_times, d.h, d.horizon);
  const auto n_paths = static_cast<std::size_t>(d.n_paths);
  const std::size_t n_times = idx.size();

  EnsembleResult out;
  out.ensemble.times = d.observation_times;
  out.ensemble.h = d.h;
  out.ensemble.delta = d.delta;
  out.ensemble.seed = d.seed;
  out.ensemble.stream_base = d.stream_base;
  out.ensemble.norms.assign(n_paths, std::vector<double>(n_times, 0.0));
  out.ensemble.clock.assign(n_paths, std::vector<double>(n_times, 0.0));

  const StableParams params(d.beta);
  parallel_for(n_paths, d.threads, [&](std::size_t i) {
    RngStream rng(d.seed, d.stream_base + i);
    try {
      const TimeChange tc =
          make_time_change(params, d.delta, d.h, d.horizon, rng);
      const VectorPath path =
          solve_time_changed_direct(d.system, tc, rng);
      for (std::size_t k = 0; k < n_times; ++k) {
        out.ensemble.norms[i][k] = path.norm_at(idx[k]);
        out.ensemble.clock[i][k] = tc.e.values[idx[k]];
      }
    } catch (const BlowUpError& e) {
      throw BlowUpError(std::string(e.what()) + " (seed " +
                        std::to_string(d.seed) + ", stream " +
                        std::to_string(d.stream_base + i) + ")");
    }
  });

  for (double p : d.p_values) {
    MomentCurve curve;
    curve.p = p;
    curve.times = d.observation_times;
    curve.n_paths = d.n_paths;
    curve.estimates.resize(n_times);
    curve.std_errors.resize(n_times);
    if (d.keep_per_path) {
      curve.per_path.assign(n_paths, std::vector<double>(n_times, 0.0));
    }
    std::vector<double> column(n_paths);
    for (std::size_t k = 0; k < n_times; ++k) {
      for (std::size_t i = 0; i < n_paths; ++i) {
        column[i] = vector_norm_p(out.ensemble.norms[i][k], p);
        if (d.keep_per_path) curve.per_path[i][k] = column[i];
      }
      const MeanSe ms = mean_se(column);
      curve.estimates[k] = ms.mean;
      curve.std_errors[k] = ms.se;
    }
    out.moments.push_back(std::move(curve));
  }
  return out;
}

MomentCurve clock_moment_curve(const StableParams& params, double decay_rate,
                               double p_label, double scale,
                               const std::vector<double>& times,
                               int n_samples, RngStream& rng,
                               bool keep_per_path) {
  if (n_samples < 2) throw ParameterError("need >= 2 clock samples");
  if (!(decay_rate >= 0.0)) throw ParameterError("decay rate must be >= 0");
  MomentCurve curve;
  curve.p = p_label;
  curve.times = times;
  curve.n_paths = n_samples;
  const std::size_t n_times = times.size();
  const auto n = static_cast<std::size_t>(n_samples);
  std::vector<std::vector<double>> values(n, std::vector<double>(n_times));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n_times; ++k) {
      const double e_t = sample_inverse_clock_marginal(params, times[k], rng);
      values[i][k] = scale * std::exp(-decay_rate * e_t);
    }
  }
  curve.estimates.resize(n_times);
  curve.std_errors.resize(n_times);
  std::vector<double> column(n);
  for (std::size_t k = 0; k < n_times; ++k) {
    for (std::size_t i = 0; i < n; ++i) column[i] = values[i][k];
    const MeanSe ms = mean_se(column);
    curve.estimates[k] = ms.mean;
    curve.std_errors[k] = ms.se;
  }
  if (keep_per_path) curve.per_path = std::move(values);
  return curve;
}

SamplePathCheck check_sample_path_exponential(const TrajectoryEnsemble& ensemble,
                                              const StabilityEnvelope& envelope,
                                              const SystemSpec& spec) {
  SamplePathCheck out;
  if (!spec.g.l1_finite() &&
      spec.perturbation != Perturbation::none) {
    return out;  // hypothesis fails: not applicable
  }
  const double g_l1 =
      spec.perturbation == Perturbation::none ? 0.0 : spec.g.l1();
  const double k = envelope.k_const;
  const double c = k * std::exp(k * g_l1);
  out.bound_constant = c;
  const double x0_norm = spec.x0.norm();
  const bool operational = spec.linear_clock == LinearClock::operational;
  // local Lipschitz scale of the right-hand side over the bounded tube
  const double lipschitz =
      (matrix_two_norm(spec.a) + spec.g.sup()) * std::max(c * x0_norm, 1e-12);
  const double allowance = (ensemble.h + ensemble.delta) * lipschitz;

  double worst = std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  std::size_t total = 0;
  std::vector<double> pooled_nu, pooled_log_norm;
  for (std::size_t i = 0; i < ensemble.norms.size(); ++i) {
    for (std::size_t j = 0; j < ensemble.times.size(); ++j) {
      const double nu =
          operational ? ensemble.clock[i][j] : ensemble.times[j];
      const double bound =
          c * x0_norm * std::exp(-envelope.lambda * nu) + allowance;
      const double margin = bound - ensemble.norms[i][j];
      worst = std::min(worst, margin);
      ++total;
      if (margin < 0.0) ++violations;
      if (ensemble.norms[i][j] > 1e-300) {
        pooled_nu.push_back(nu);
        pooled_log_norm.push_back(std::log(ensemble.norms[i][j]));
      }
    }
  }
  out.worst_margin = worst;
  out.violation_fraction =
      total == 0 ? 0.0 : static_cast<double>(violations) / total;
  out.verdict = violations == 0 ? Verdict::pass : Verdict::fail;
  if (pooled_nu.size() >= 2) {
    bool varied = false;
    for (double v : pooled_nu) varied = varied || v != pooled_nu.front();
    if (varied) out.fitted_slope = fit_line(pooled_nu, pooled_log_norm).slope;
  }
  return out;
}

MomentBoundCheck check_moment_bound(const MomentCurve& curve, double beta,
                                    const StabilityEnvelope& envelope,
                                    const SystemSpec& spec,
                                    MomentBoundMode mode) {
  MomentBoundCheck out;
  const bool has_pert = spec.perturbation != Perturbation::none;
  if (mode == MomentBoundMode::square_mean) {
    if (curve.p != 2.0) {
      throw ParameterError("square-mean bound requires the p = 2 curve");
    }
    if (has_pert && !spec.g.l2_finite()) return out;
  } else {
    if (has_pert && !spec.g.l1_finite()) return out;
  }
  const double p = curve.p;
  const double k = envelope.k_const;
  const double lambda = envelope.lambda;
  const double x0_norm = spec.x0.norm();
  double prefactor = 0.0;
  double rate = 0.0;
  if (mode == MomentBoundMode::square_mean) {
    const double g_l2 = has_pert ? spec.g.l2() : 0.0;
    prefactor = 2.0 * k * k * std::exp(2.0 * k * k * g_l2) * x0_norm * x0_norm;
    rate = 2.0 * lambda;
  } else {
    const double g_l1 = has_pert ? spec.g.l1() : 0.0;
    prefactor = std::pow(k, p) * std::pow(x0_norm, p) * std::exp(k * p * g_l1);
    rate = p * lambda;
  }
  out.margins.resize(curve.times.size());
  std::size_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < curve.times.size(); ++j) {
    const double t = curve.times[j];
    double shape;
    if (mode == MomentBoundMode::exp_bound) {
      shape = std::exp(-rate * t);
    } else {
      shape = ml_eval(beta, -rate * std::pow(t, beta));
    }
    const double bound = prefactor * shape;
    const double margin =
        bound + 3.0 * curve.std_errors[j] - curve.estimates[j];
    out.margins[j] = margin;
    worst = std::min(worst, margin);
    if (margin < 0.0) ++violations;
  }
  out.worst_margin = worst;
  out.violation_fraction = curve.times.empty()
                               ? 0.0
                               : static_cast<double>(violations) /
                                     static_cast<double>(curve.times.size());
  out.verdict = violations == 0 ? Verdict::pass : Verdict::fail;
  return out;
}

TailFit fit_tail_exponent(const MomentCurve& curve, double t_lo, double t_hi,
                          RngStream* rng, int n_resamples) {
  if (!(t_lo > 0.0) || !(t_hi > t_lo)) {
    throw ParameterError("tail window needs 0 < t_lo < t_hi");
  }
  std::vector<double> ts, est;
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < curve.times.size(); ++j) {
    if (curve.times[j] >= t_lo && curve.times[j] <= t_hi) {
      ts.push_back(curve.times[j]);
      est.push_back(curve.estimates[j]);
      cols.push_back(j);
    }
  }
  if (ts.size() < 3) {
    throw ParameterError("tail window covers fewer than 3 observation times");
  }
  for (double v : est) {
    if (!(v > 0.0)) {
      throw DataError("nonpositive moment estimates in the tail window; "
                      "decay data insufficient for a log fit");
    }
  }
  TailFit out;
  const LineFit ll = fit_loglog(ts, est);
  const LineFit sl = fit_semilog(ts, est);
  out.slope = ll.slope;
  out.kind = ll.residual_ss <= sl.residual_ss ? DecayKind::power_law
                                              : DecayKind::super_polynomial;
  out.ci_lo = out.ci_hi = ll.slope;
  if (rng != nullptr && !curve.per_path.empty()) {
    std::vector<std::vector<double>> windowed(curve.per_path.size());
    for (std::size_t i = 0; i < curve.per_path.size(); ++i) {
      windowed[i].reserve(cols.size());
      for (std::size_t c : cols) windowed[i].push_back(curve.per_path[i][c]);
    }
    const BootstrapCi ci =
        bootstrap_loglog_slope(windowed, ts, n_resamples, 0.95, *rng);
    out.ci_lo = ci.lo;
    out.ci_hi = ci.hi;
  }
  return out;
}

DualityMomentCheck duality_moment_check(const ExperimentDesign& design,
                                        double p,
                                        const std::vector<double>& times) {
  if (design.system.linear_clock != LinearClock::operational) {
    throw UnsupportedError(
        "moment duality needs every term on the operational clock");
  }
  if (times.empty()) throw ParameterError("need at least one check time");

  // route one: direct time-changed ensemble
  ExperimentDesign direct = design;
  direct.observation_times = times;
  direct.p_values = {p};
  direct.keep_per_path = false;
  const EnsembleResult ens = run_ensemble(direct);
  const MomentCurve& curve = ens.moments.front();

  // route two: classical moment curve composed with exact clock marginals
  const StableParams params(design.beta);
  RngStream clock_rng(design.seed, design.stream_base + 0x636c6f636bULL);
  const auto n_clock = static_cast<std::size_t>(design.n_paths);
  std::vector<std::vector<double>> e_samples(
      times.size(), std::vector<double>(n_clock));
  double e_max = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t i = 0; i < n_clock; ++i) {
      const double e =
          sample_inverse_clock_marginal(params, times[j], clock_rng);
      e_samples[j][i] = e;
      e_max = std::max(e_max, e);
    }
  }
  const double delta_op = design.delta;
  const auto n_steps =
      static_cast<std::size_t>(std::ceil(e_max / delta_op)) + 1;
  const bool stochastic = design.system.perturbation ==
                          Perturbation::diffusion_in_clock_brownian;
  const std::size_t n_classical = stochastic ? 2000 : 1;
  std::vector<double> m_mean(n_steps + 1, 0.0);
  std::vector<double> m_sq(n_steps + 1, 0.0);
  for (std::size_t i = 0; i < n_classical; ++i) {
    RngStream rng(design.seed, design.stream_base + 0x647561ULL + i);
    const VectorPath y =
        solve_classical(design.system, delta_op, n_steps, rng);
    for (std::size_t j = 0; j <= n_steps; ++j) {
      const double v = vector_norm_p(y.norm_at(j), p);
      m_mean[j] += v;
      m_sq[j] += v * v;
    }
  }
  std::vector<double> m_se(n_steps + 1, 0.0);
  for (std::size_t j = 0; j <= n_steps; ++j) {
    m_mean[j] /= static_cast<double>(n_classical);
    if (n_classical > 1) {
      const double var =
          (m_sq[j] - static_cast<double>(n_classical) * m_mean[j] * m_mean[j]) /
          static_cast<double>(n_classical - 1);
      m_se[j] = std::sqrt(std::max(var, 0.0) /
                          static_cast<double>(n_classical));
    }
  }

  DualityMomentCheck out;
  out.times = times;
  out.verdict = Verdict::pass;
  for (std::size_t j = 0; j < times.size(); ++j) {
    double acc = 0.0, acc_sq = 0.0, se_sq_acc = 0.0;
    for (std::size_t i = 0; i < n_clock; ++i) {
      const auto idx = std::min(
          static_cast<std::size_t>(e_samples[j][i] / delta_op), n_steps);
      const double v = m_mean[idx];
      acc += v;
      acc_sq += v * v;
      se_sq_acc += m_se[idx] * m_se[idx];
    }
    const double nn = static_cast<double>(n_clock);
    const double composed = acc / nn;
    const double clock_var =
        (acc_sq - nn * composed * composed) / (nn - 1.0);
    // clock sampling variance plus the averaged classical-curve noise
    const double se_b =
        std::sqrt(std::max(clock_var, 0.0) / nn + se_sq_acc / (nn * nn));
    const double se = std::sqrt(curve.std_errors[j] * curve.std_errors[j] +
                                se_b * se_b);
    out.direct_estimate.push_back(curve.estimates[j]);
    out.composed_estimate.push_back(composed);
    out.combined_se.push_back(se);
    const double z =
        se > 0.0 ? std::abs(curve.estimates[j] - composed) / se : 0.0;
    out.worst_z = std::max(out.worst_z, z);
    if (std::abs(curve.estimates[j] - composed) > 3.0 * se) {
      out.verdict = Verdict::fail;
    }
  }
  return out;
}

StabilityAnalysis run_stability_analysis(const ExperimentDesign& design) {
  StabilityAnalysis out;
  out.envelope = fit_envelope(design.system.a);
  EnsembleResult ens = run_ensemble(design);
  out.moments = std::move(ens.moments);
  out.ensemble = std::move(ens.ensemble);

  const bool operational =
      design.system.linear_clock == LinearClock::operational;
  const bool diffusion = design.system.perturbation ==
                         Perturbation::diffusion_in_clock_brownian;
  auto& verdicts = out.report.verdicts;
  verdicts["sample_path_exponential"] = Verdict::not_applicable;
  verdicts["pth_moment_asymptotic"] = Verdict::not_applicable;
  verdicts["pth_moment_exponential"] = Verdict::not_applicable;
  verdicts["square_mean_asymptotic"] = Verdict::not_applicable;
  out.report.system_id = operational
                             ? (diffusion ? "operational_diffusion"
                                          : "operational_drift")
                             : (diffusion ? "natural_diffusion"
                                          : "natural_drift");
  out.report.fitted_rates["lambda"] = out.envelope.lambda;
  out.report.fitted_rates["k_const"] = out.envelope.k_const;

  double worst_violation = 0.0;
  if (!diffusion) {
    const SamplePathCheck sp = check_sample_path_exponential(
        out.ensemble, out.envelope, design.system);
    verdicts["sample_path_exponential"] = sp.verdict;
    out.report.fitted_rates["sample_path_slope"] = sp.fitted_slope;
    worst_violation = std::max(worst_violation, sp.violation_fraction);
    const MomentBoundMode mode =
        operational ? MomentBoundMode::ml_bound : MomentBoundMode::exp_bound;
    const std::string key =
        operational ? "pth_moment_asymptotic" : "pth_moment_exponential";
    Verdict combined = Verdict::not_applicable;
    for (const MomentCurve& curve : out.moments) {
      const MomentBoundCheck mb = check_moment_bound(
          curve, design.beta, out.envelope, design.system, mode);
      worst_violation = std::max(worst_violation, mb.violation_fraction);
      if (mb.verdict == Verdict::not_applicable) continue;
      if (combined == Verdict::not_applicable) combined = Verdict::pass;
      if (mb.verdict == Verdict::fail) combined = Verdict::fail;
    }
    verdicts[key] = combined;
  } else if (operational) {
    for (const MomentCurve& curve : out.moments) {
      if (curve.p != 2.0) continue;
      const MomentBoundCheck mb =
          check_moment_bound(curve, design.beta, out.envelope, design.system,
                             MomentBoundMode::square_mean);
      verdicts["square_mean_asymptotic"] = mb.verdict;
      worst_violation = std::max(worst_violation, mb.violation_fraction);
    }
  }
  out.report.bound_violation_fraction = worst_violation;
  return out;
}

}  // namespace tcsde
