#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tcsde/sde.hpp"

namespace tcsde {

enum class Verdict { pass, fail, not_applicable };

const char* verdict_name(Verdict v);

// Monte Carlo experiment description; one solver run per path with stream
// id stream_base + path index, so any single path can be replayed.
struct ExperimentDesign {
  SystemSpec system;
  double beta = 0.5;
  int n_paths = 1000;
  double h = 0.01;
  double delta = 0.005;
  double horizon = 10.0;
  std::vector<double> observation_times;  // defaults to make_observation_grid
  std::vector<double> p_values{1.0, 2.0};
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
  unsigned threads = 1;
  bool keep_per_path = false;

  void validate() const;
};

// t = 0, a linear ramp to min(1, horizon), then log spacing out to the
// horizon; every point snapped onto the calendar lattice.
std::vector<double> make_observation_grid(double horizon, double h);

struct MomentCurve {
  double p = 1.0;
  std::vector<double> times;
  std::vector<double> estimates;
  std::vector<double> std_errors;
  int n_paths = 0;
  // ||X(t)||^p per path and time; filled only when requested, it is the
  // input the bootstrap resamples
  std::vector<std::vector<double>> per_path;
};

struct TrajectoryEnsemble {
  std::vector<double> times;
  std::vector<std::vector<double>> norms;  // [path][time] ||X(t)||
  std::vector<std::vector<double>> clock;  // [path][time] E_t
  double h = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
};

struct EnsembleResult {
  TrajectoryEnsemble ensemble;
  std::vector<MomentCurve> moments;  // one per requested p
};

EnsembleResult run_ensemble(const ExperimentDesign& design);

// Moment curve of scale * exp(-decay_rate * E_t) estimated from exact
// clock marginals; the law of the g = zero operational systems, at a
// fraction of the cost of full trajectory simulation.
MomentCurve clock_moment_curve(const StableParams& params, double decay_rate,
                               double p_label, double scale,
                               const std::vector<double>& times,
                               int n_samples, RngStream& rng,
                               bool keep_per_path);

struct SamplePathCheck {
  Verdict verdict = Verdict::not_applicable;
  double worst_margin = 0.0;
  double violation_fraction = 0.0;
  double fitted_slope = 0.0;  // pooled slope of log||X|| against nu(t)
  double bound_constant = 0.0;
};

// Pathwise bound ||X(t)|| <= C ||x0|| exp(-lambda nu(t)) with
// C = k_const * exp(k_const * integral of g), nu = E_t for operational
// linear clocks and nu = t for natural ones, allowing (h + delta) * L of
// discretization slack with L a local Lipschitz estimate. Requires the
// integrable-gain hypothesis; otherwise not_applicable.
SamplePathCheck check_sample_path_exponential(const TrajectoryEnsemble& ensemble,
                                              const StabilityEnvelope& envelope,
                                              const SystemSpec& spec);

enum class MomentBoundMode { ml_bound, exp_bound, square_mean };

struct MomentBoundCheck {
  Verdict verdict = Verdict::not_applicable;
  double violation_fraction = 0.0;
  double worst_margin = 0.0;
  std::vector<double> margins;  // bound + 3 SE - estimate, per time
};

// estimate(t) <= Bound(t) + 3 SE(t) at every observation time, with
//   ml_bound:    K^p ||x0||^p exp(K p int g)  * E_beta(-lambda p t^beta)
//   exp_bound:   K^p ||x0||^p exp(K p int g)  * exp(-p lambda t)
//   square_mean: 2 K^2 ||x0||^2 exp(2 K^2 int g^2) * E_beta(-2 lambda t^beta)
// square_mean requires p = 2; hypothesis flags (L1 for the first two, L2
// for square_mean) gate applicability.
MomentBoundCheck check_moment_bound(const MomentCurve& curve, double beta,
                                    const StabilityEnvelope& envelope,
                                    const SystemSpec& spec,
                                    MomentBoundMode mode);

enum class DecayKind { power_law, super_polynomial };

struct TailFit {
  double slope = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  DecayKind kind = DecayKind::power_law;
};

// Log-log slope of the moment curve on [t_lo, t_hi], bootstrap CI when
// per-path data is present, and a power-law versus super-polynomial
// classification by comparing log-log against semi-log fit residuals.
TailFit fit_tail_exponent(const MomentCurve& curve, double t_lo, double t_hi,
                          RngStream* rng = nullptr, int n_resamples = 200);

struct DualityMomentCheck {
  Verdict verdict = Verdict::not_applicable;
  std::vector<double> times;
  std::vector<double> direct_estimate;
  std::vector<double> composed_estimate;
  std::vector<double> combined_se;
  double worst_z = 0.0;  // max |difference| / combined SE
};

// Two independent estimators of E||X(t)||^p for operational-clock systems:
// the direct time-changed ensemble against the classical moment curve
// integrated over exact clock marginals. Agreement within 3 combined
// standard errors at each requested time.
DualityMomentCheck duality_moment_check(const ExperimentDesign& design,
                                        double p,
                                        const std::vector<double>& times);

struct StabilityReport {
  std::string system_id;
  std::map<std::string, Verdict> verdicts;
  std::map<std::string, double> fitted_rates;
  double bound_violation_fraction = 0.0;
};

struct StabilityAnalysis {
  StabilityReport report;
  StabilityEnvelope envelope;
  std::vector<MomentCurve> moments;
  TrajectoryEnsemble ensemble;
};

// Full pipeline: envelope fit, ensemble, then every check the system
// class supports; unsupported checks are reported not_applicable.
StabilityAnalysis run_stability_analysis(const ExperimentDesign& design);

}  // namespace tcsde
