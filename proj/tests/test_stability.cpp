#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "tcsde/errors.hpp"
#include "tcsde/mittag_leffler.hpp"
#include "tcsde/stability.hpp"
#include "tcsde/stats.hpp"

using namespace tcsde;

namespace {

SystemSpec scalar_system(double a, LinearClock clock, Perturbation pert,
                         GFunction g = GFunction::zero()) {
  SystemSpec spec;
  spec.a = Eigen::MatrixXd::Constant(1, 1, a);
  spec.linear_clock = clock;
  spec.perturbation = pert;
  spec.g = g;
  spec.x0 = Eigen::VectorXd::Constant(1, 1.0);
  return spec;
}

ExperimentDesign small_design(const SystemSpec& spec, std::uint64_t seed) {
  ExperimentDesign d;
  d.system = spec;
  d.n_paths = 100;
  d.horizon = 2.0;
  d.seed = seed;
  return d;
}

// effective decay rate of the Euler product (1 - delta)^(E/delta)
double euler_rate(double delta) { return -std::log1p(-delta) / delta; }

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("observation grid is sorted, snapped and spans the horizon") {
  const double h = 0.01;
  const std::vector<double> grid = make_observation_grid(10.0, h);
  REQUIRE(grid.size() >= 10);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == doctest::Approx(10.0).epsilon(1e-12));
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    CHECK(grid[i] < grid[i + 1]);
  }
  for (const double t : grid) {
    const double steps = t / h;
    CHECK(std::abs(steps - std::round(steps)) < 1e-9);
    CHECK(t >= 0.0);
    CHECK(t <= 10.0 + 1e-12);
  }
  // short horizons get only the linear ramp
  const std::vector<double> short_grid = make_observation_grid(0.5, 0.01);
  CHECK(short_grid.size() == 9);
  CHECK(short_grid.back() == doctest::Approx(0.5));
  CHECK_THROWS_AS(static_cast<void>(make_observation_grid(0.0, 0.01)),
                  ParameterError);
}

TEST_CASE("experiment design validation") {
  ExperimentDesign d = small_design(
      scalar_system(-1.0, LinearClock::operational, Perturbation::none), 1);
  CHECK_NOTHROW(d.validate());
  d.n_paths = 99;
  CHECK_THROWS_AS(d.validate(), ParameterError);
  d.n_paths = 100;
  d.p_values = {1.0, 0.0};
  CHECK_THROWS_AS(d.validate(), ParameterError);
  d.p_values = {};
  CHECK_THROWS_AS(d.validate(), ParameterError);
  d.p_values = {1.0};
  d.beta = 1.2;
  CHECK_THROWS_AS(d.validate(), ParameterError);
  d.beta = 0.5;
  d.h = 0.0;
  CHECK_THROWS_AS(d.validate(), ParameterError);
}

TEST_CASE("ensemble mean matches the exact clock law") {
  // undriven operational decay: ||X(t)|| = exp(-rate * E_t) exactly, so the
  // ensemble mean must agree with fresh exact clock marginals up to Monte
  // Carlo noise and the clock overshoot bias (at most delta)
  ExperimentDesign d = small_design(
      scalar_system(-1.0, LinearClock::operational, Perturbation::none), 21);
  d.n_paths = 400;
  d.horizon = 3.0;
  d.observation_times = {0.0, 1.0, 2.0};
  d.p_values = {1.0};
  const EnsembleResult ens = run_ensemble(d);
  REQUIRE(ens.moments.size() == 1);
  const MomentCurve& curve = ens.moments.front();
  CHECK(curve.estimates[0] == 1.0);
  CHECK(curve.std_errors[0] == 0.0);

  const double rate = euler_rate(d.delta);
  const StableParams params(d.beta);
  RngStream rng(99, 0);
  const MomentCurve exact = clock_moment_curve(
      params, rate, 1.0, 1.0, d.observation_times, 20000, rng, false);
  for (std::size_t k = 1; k < curve.times.size(); ++k) {
    const double tol =
        3.0 * std::hypot(curve.std_errors[k], exact.std_errors[k]) +
        rate * d.delta * exact.estimates[k];
    INFO("t = ", curve.times[k], " ensemble ", curve.estimates[k], " exact ",
         exact.estimates[k], " tol ", tol);
    CHECK(std::abs(curve.estimates[k] - exact.estimates[k]) < tol);
  }
}

TEST_CASE("exact clock moment curve tracks the special function") {
  const StableParams params(0.5);
  const std::vector<double> times = {0.0, 0.5, 1.0, 2.0, 5.0};
  RngStream rng(22, 0);
  const MomentCurve curve =
      clock_moment_curve(params, 1.0, 1.0, 1.0, times, 20000, rng, false);
  CHECK(curve.estimates[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double want = ml_eval(0.5, -std::sqrt(times[k]));
    INFO("t = ", times[k], " estimate ", curve.estimates[k], " want ", want);
    CHECK(std::abs(curve.estimates[k] - want) <
          3.5 * curve.std_errors[k]);
  }
  CHECK_THROWS_AS(static_cast<void>(clock_moment_curve(
                      params, -1.0, 1.0, 1.0, times, 100, rng, false)),
                  ParameterError);
  CHECK_THROWS_AS(static_cast<void>(clock_moment_curve(
                      params, 1.0, 1.0, 1.0, times, 1, rng, false)),
                  ParameterError);
}

TEST_CASE("pathwise envelope holds for a driven operational system") {
  ExperimentDesign d = small_design(
      scalar_system(-1.0, LinearClock::operational,
                    Perturbation::drift_in_clock, GFunction::exp_decay(0.2, 2.0)),
      23);
  d.n_paths = 200;
  d.horizon = 10.0;
  d.p_values = {1.0};
  const EnsembleResult ens = run_ensemble(d);
  const StabilityEnvelope env = fit_envelope(d.system.a);
  const SamplePathCheck sp =
      check_sample_path_exponential(ens.ensemble, env, d.system);
  CHECK(sp.verdict == Verdict::pass);
  CHECK(sp.violation_fraction == 0.0);
  CHECK(sp.worst_margin > 0.0);
  CHECK(sp.bound_constant ==
        doctest::Approx(env.k_const * std::exp(env.k_const * 0.1))
            .epsilon(1e-12));
  INFO("pooled slope ", sp.fitted_slope);
  CHECK(sp.fitted_slope < -0.9 * env.lambda);
}

TEST_CASE("non-integrable gain disables the pathwise check") {
  const SystemSpec spec =
      scalar_system(-1.0, LinearClock::operational,
                    Perturbation::drift_in_clock, GFunction::power(1.0, 0.5));
  TrajectoryEnsemble ensemble;  // never inspected
  const StabilityEnvelope env = fit_envelope(spec.a);
  const SamplePathCheck sp =
      check_sample_path_exponential(ensemble, env, spec);
  CHECK(sp.verdict == Verdict::not_applicable);
}

TEST_CASE("moment bound against the exact clock law") {
  const StableParams params(0.5);
  const SystemSpec spec =
      scalar_system(-1.0, LinearClock::operational, Perturbation::none);
  const StabilityEnvelope env = fit_envelope(spec.a);
  const std::vector<double> times = {0.5, 1.0, 2.0, 5.0};
  RngStream rng(24, 0);
  const double rate = euler_rate(0.005);
  const MomentCurve curve =
      clock_moment_curve(params, rate, 1.0, 1.0, times, 10000, rng, false);
  const MomentBoundCheck mb =
      check_moment_bound(curve, 0.5, env, spec, MomentBoundMode::ml_bound);
  CHECK(mb.verdict == Verdict::pass);
  CHECK(mb.violation_fraction == 0.0);
  CHECK(mb.worst_margin > 0.0);
  CHECK(mb.margins.size() == times.size());
}

TEST_CASE("moment bound at time zero reduces to the prefactor") {
  const SystemSpec spec =
      scalar_system(-1.0, LinearClock::operational, Perturbation::none);
  const StabilityEnvelope env = fit_envelope(spec.a);
  MomentCurve curve;
  curve.p = 1.0;
  curve.times = {0.0};
  curve.estimates = {1.0};
  curve.std_errors = {0.0};
  curve.n_paths = 100;
  const MomentBoundCheck mb =
      check_moment_bound(curve, 0.5, env, spec, MomentBoundMode::ml_bound);
  CHECK(mb.verdict == Verdict::pass);
  // bound(0) = k^p ||x0||^p, estimate 1, so the margin is k - 1
  CHECK(mb.margins[0] == doctest::Approx(env.k_const - 1.0).epsilon(1e-9));
}

TEST_CASE("square-mean bound demands the second moment curve") {
  const SystemSpec spec = scalar_system(
      -1.0, LinearClock::operational,
      Perturbation::diffusion_in_clock_brownian, GFunction::exp_decay(1, 1));
  const StabilityEnvelope env = fit_envelope(spec.a);
  MomentCurve curve;
  curve.p = 1.0;
  curve.times = {1.0};
  curve.estimates = {0.5};
  curve.std_errors = {0.01};
  CHECK_THROWS_AS(static_cast<void>(check_moment_bound(
                      curve, 0.5, env, spec, MomentBoundMode::square_mean)),
                  ParameterError);
  // square-integrable gain hypothesis gates applicability
  SystemSpec slow = spec;
  slow.g = GFunction::power(1.0, 0.4);
  curve.p = 2.0;
  const MomentBoundCheck na = check_moment_bound(
      curve, 0.5, env, slow, MomentBoundMode::square_mean);
  CHECK(na.verdict == Verdict::not_applicable);
}

TEST_CASE("natural-clock analysis certifies exponential decay") {
  ExperimentDesign d = small_design(
      scalar_system(-1.0, LinearClock::natural, Perturbation::drift_in_clock,
                    GFunction::exp_decay(0.2, 2.0)),
      25);
  d.n_paths = 200;
  d.horizon = 5.0;
  const StabilityAnalysis an = run_stability_analysis(d);
  CHECK(an.report.system_id == "natural_drift");
  CHECK(an.report.verdicts.at("sample_path_exponential") == Verdict::pass);
  CHECK(an.report.verdicts.at("pth_moment_exponential") == Verdict::pass);
  CHECK(an.report.verdicts.at("pth_moment_asymptotic") ==
        Verdict::not_applicable);
  CHECK(an.report.verdicts.at("square_mean_asymptotic") ==
        Verdict::not_applicable);
  CHECK(an.report.bound_violation_fraction == 0.0);
  CHECK(an.report.fitted_rates.at("lambda") == doctest::Approx(0.95));
  // undriven tail: fitted decay rate of the p = 1 moment curve on [2, 5]
  const MomentCurve& m1 = an.moments.front();
  std::vector<double> ts, es;
  for (std::size_t k = 0; k < m1.times.size(); ++k) {
    if (m1.times[k] >= 2.0) {
      ts.push_back(m1.times[k]);
      es.push_back(m1.estimates[k]);
    }
  }
  const LineFit f = fit_semilog(ts, es);
  INFO("fitted exponential rate ", f.slope);
  CHECK(f.slope < -0.9);
}

TEST_CASE("operational analysis certifies the slow asymptotic regime") {
  ExperimentDesign d = small_design(
      scalar_system(-1.0, LinearClock::operational,
                    Perturbation::drift_in_clock, GFunction::exp_decay(0.2, 2.0)),
      26);
  d.n_paths = 200;
  d.horizon = 10.0;
  const StabilityAnalysis an = run_stability_analysis(d);
  CHECK(an.report.system_id == "operational_drift");
  CHECK(an.report.verdicts.at("sample_path_exponential") == Verdict::pass);
  CHECK(an.report.verdicts.at("pth_moment_asymptotic") == Verdict::pass);
  CHECK(an.report.verdicts.at("pth_moment_exponential") ==
        Verdict::not_applicable);
  CHECK(an.report.fitted_rates.count("sample_path_slope") == 1);
}

TEST_CASE("square-mean verdict for the noise-driven operational system") {
  ExperimentDesign d = small_design(
      scalar_system(-1.0, LinearClock::operational,
                    Perturbation::diffusion_in_clock_brownian,
                    GFunction::exp_decay(1.0, 1.0)),
      27);
  d.n_paths = 300;
  d.horizon = 5.0;
  const StabilityAnalysis an = run_stability_analysis(d);
  CHECK(an.report.system_id == "operational_diffusion");
  CHECK(an.report.verdicts.at("square_mean_asymptotic") == Verdict::pass);
  CHECK(an.report.verdicts.at("sample_path_exponential") ==
        Verdict::not_applicable);
  CHECK(an.report.verdicts.at("pth_moment_asymptotic") ==
        Verdict::not_applicable);
}

TEST_CASE("natural diffusion admits no implemented certificate") {
  ExperimentDesign d = small_design(
      scalar_system(-1.0, LinearClock::natural,
                    Perturbation::diffusion_in_clock_brownian,
                    GFunction::exp_decay(1.0, 1.0)),
      28);
  const StabilityAnalysis an = run_stability_analysis(d);
  CHECK(an.report.system_id == "natural_diffusion");
  for (const auto& [key, verdict] : an.report.verdicts) {
    INFO("verdict key ", key);
    CHECK(verdict == Verdict::not_applicable);
  }
}

TEST_CASE("two moment estimators agree across the duality") {
  ExperimentDesign d = small_design(
      scalar_system(-1.0, LinearClock::operational,
                    Perturbation::diffusion_in_clock_brownian,
                    GFunction::exp_decay(1.0, 1.0)),
      29);
  d.n_paths = 400;
  d.horizon = 2.0;
  const DualityMomentCheck dual =
      duality_moment_check(d, 2.0, {0.5, 1.0, 2.0});
  CHECK(dual.verdict == Verdict::pass);
  INFO("worst z ", dual.worst_z);
  CHECK(dual.worst_z < 3.0);
  CHECK(dual.times.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(dual.direct_estimate[j] > 0.0);
    CHECK(dual.composed_estimate[j] > 0.0);
    CHECK(dual.combined_se[j] > 0.0);
  }

  ExperimentDesign natural = d;
  natural.system.linear_clock = LinearClock::natural;
  CHECK_THROWS_AS(
      static_cast<void>(duality_moment_check(natural, 2.0, {1.0})),
      UnsupportedError);
  CHECK_THROWS_AS(static_cast<void>(duality_moment_check(d, 2.0, {})),
                  ParameterError);
}

TEST_CASE("tail fit recovers a synthetic power law") {
  MomentCurve curve;
  curve.p = 1.0;
  curve.n_paths = 100;
  for (double t = 1.0; t <= 128.0; t *= 2.0) {
    curve.times.push_back(t);
    curve.estimates.push_back(5.0 / (t * t));
    curve.std_errors.push_back(0.0);
  }
  const TailFit fit = fit_tail_exponent(curve, 2.0, 128.0);
  CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(fit.kind == DecayKind::power_law);
  CHECK(fit.ci_lo == fit.slope);

  MomentCurve expo = curve;
  for (std::size_t k = 0; k < expo.times.size(); ++k) {
    expo.estimates[k] = std::exp(-0.5 * expo.times[k]);
  }
  const TailFit efit = fit_tail_exponent(expo, 2.0, 128.0);
  CHECK(efit.kind == DecayKind::super_polynomial);

  CHECK_THROWS_AS(static_cast<void>(fit_tail_exponent(curve, 60.0, 128.0)),
                  ParameterError);
  CHECK_THROWS_AS(static_cast<void>(fit_tail_exponent(curve, 0.0, 128.0)),
                  ParameterError);
}

TEST_CASE("tail fit bootstraps an interval from per-path data") {
  RngStream gen(30, 0);
  MomentCurve curve;
  curve.p = 1.0;
  curve.times = {4.0, 8.0, 16.0, 32.0, 64.0};
  const int n_paths = 150;
  curve.n_paths = n_paths;
  curve.per_path.assign(n_paths, {});
  for (int i = 0; i < n_paths; ++i) {
    for (const double t : curve.times) {
      curve.per_path[i].push_back(std::exp(0.2 * gen.standard_normal()) /
                                  std::sqrt(t));
    }
  }
  curve.estimates.assign(curve.times.size(), 0.0);
  curve.std_errors.assign(curve.times.size(), 0.0);
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    std::vector<double> col;
    for (int i = 0; i < n_paths; ++i) col.push_back(curve.per_path[i][k]);
    curve.estimates[k] = mean_se(col).mean;
  }
  RngStream boot(30, 1);
  const TailFit fit = fit_tail_exponent(curve, 4.0, 64.0, &boot, 300);
  INFO("slope ", fit.slope, " ci [", fit.ci_lo, ", ", fit.ci_hi, "]");
  CHECK(std::abs(fit.slope + 0.5) < 0.05);
  CHECK(fit.ci_lo < fit.ci_hi);
  CHECK(fit.ci_lo <= fit.slope);
  CHECK(fit.slope <= fit.ci_hi);
}

TEST_CASE("undriven moment curve is exactly monotone") {
  ExperimentDesign d = small_design(
      scalar_system(-1.0, LinearClock::operational, Perturbation::none), 31);
  d.horizon = 4.0;
  d.p_values = {1.0};
  const EnsembleResult ens = run_ensemble(d);
  const MomentCurve& curve = ens.moments.front();
  CHECK(curve.estimates.front() == 1.0);
  for (std::size_t k = 0; k + 1 < curve.estimates.size(); ++k) {
    CHECK(curve.estimates[k + 1] <= curve.estimates[k]);
  }
}

TEST_CASE("time-changed decay dominates classical decay at late times") {
  // the inverse clock grows like t^beta, so the undriven moment sits far
  // above the classical exponential at t = 20
  const StableParams params(0.5);
  RngStream rng(32, 0);
  const MomentCurve curve =
      clock_moment_curve(params, 1.0, 1.0, 1.0, {20.0}, 4000, rng, false);
  CHECK(curve.estimates[0] - 3.0 * curve.std_errors[0] >
        10.0 * std::exp(-20.0));
}

TEST_CASE("slow regime connects to the classical one near beta = 1") {
  // the asymptotic-bound shape at beta close to 1 stays within 10% of the
  // classical exponential shape over moderate times
  for (double t = 0.25; t <= 5.0; t += 0.25) {
    const double ml = ml_eval(0.99, -0.2 * std::pow(t, 0.99));
    const double classical = std::exp(-0.2 * t);
    const double ratio = ml / classical;
    INFO("t = ", t, " ratio ", ratio);
    CHECK(ratio > 0.9);
    CHECK(ratio < 1.1);
  }
}

TEST_CASE("diverging ensemble names the offending stream") {
  ExperimentDesign d = small_design(
      scalar_system(3.0, LinearClock::natural, Perturbation::none), 33);
  d.horizon = 12.0;
  CHECK_THROWS_WITH_AS(static_cast<void>(run_ensemble(d)),
                       doctest::Contains("stream"), BlowUpError);
}

TEST_CASE("unstable matrix stops the analysis before simulation") {
  ExperimentDesign d = small_design(
      scalar_system(1.0, LinearClock::operational, Perturbation::none), 34);
  CHECK_THROWS_WITH_AS(static_cast<void>(run_stability_analysis(d)),
                       doctest::Contains("spectral abscissa"),
                       HypothesisError);
}

}  // TEST_SUITE
