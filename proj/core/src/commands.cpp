#include "tcsde/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tcsde/calculus.hpp"
#include "tcsde/csv.hpp"
#include "tcsde/errors.hpp"
#include "tcsde/manifest.hpp"
#include "tcsde/mittag_leffler.hpp"
#include "tcsde/stability.hpp"
#include "tcsde/timechange.hpp"

namespace tcsde {

namespace {

void write_table(const std::filesystem::path& dir, const std::string& name,
                 const CsvTable& table, RunManifest& manifest) {
  const std::string text = csv_to_string(table);
  write_text_atomic(dir / name, text);
  manifest.record_output(name, text);
}

void write_json_output(const std::filesystem::path& dir,
                       const std::string& name, const nlohmann::json& j,
                       RunManifest& manifest) {
  const std::string text = j.dump(2) + "\n";
  write_text_atomic(dir / name, text);
  manifest.record_output(name, text);
}

std::string p_label(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", p);
  std::string s(buf);
  for (char& c : s) {
    if (c == '.' || c == '-' || c == '+') c = '_';
  }
  return s;
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += ", ";
    out += names[i];
  }
  return out;
}

}  // namespace

unsigned resolve_threads(std::optional<unsigned> flag_value,
                         std::optional<unsigned> config_value) {
  if (flag_value) return *flag_value;
  if (const char* env = std::getenv("TCSDE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096) {
      throw ParameterError(
          "TCSDE_THREADS must be a positive integer, got \"" +
          std::string(env) + "\"");
    }
    return static_cast<unsigned>(v);
  }
  if (config_value) return *config_value;
  return 1;
}

void cmd_simulate(const SimulateConfig& cfg,
                  const std::filesystem::path& out_dir, unsigned threads) {
  const StableParams params(cfg.beta);

  // Budget gate before anything is allocated: the covering subordinator
  // provisions ~4 * E[E_horizon] / delta points and each stored scalar
  // costs ~64 bytes once serialized.
  const double op_points = 4.0 * std::pow(cfg.horizon, cfg.beta) /
                           std::tgamma(1.0 + cfg.beta) / cfg.delta;
  const double cal_points = cfg.horizon / cfg.h + 1.0;
  const double dim = static_cast<double>(cfg.system.dim());
  const double est_mb = (op_points * 2.0 + cal_points * (4.0 + 2.0 * dim)) *
                        64.0 / (1024.0 * 1024.0);
  if (est_mb > cfg.memory_budget_mb) {
    throw BudgetError("estimated footprint " + format_double(est_mb) +
                      " MiB exceeds memory_budget_mb = " +
                      format_double(cfg.memory_budget_mb) +
                      "; raise the budget or coarsen delta/h");
  }

  RngStream clock_rng(cfg.seed, 0);
  const TimeChange tc =
      make_time_change(params, cfg.delta, cfg.h, cfg.horizon, clock_rng);
  RngStream brownian_rng(cfg.seed, 1);
  const GridPath b = time_changed_brownian(tc.e, brownian_rng);
  RngStream solution_rng(cfg.seed, 2);
  const VectorPath x = solve_time_changed_direct(cfg.system, tc, solution_rng);

  RunManifest manifest =
      make_manifest("simulate", simulate_config_to_json(cfg), cfg.seed,
                    threads);

  const std::string beta_line = "beta=" + format_double(cfg.beta);
  const std::string seed_line = "seed=" + std::to_string(cfg.seed);

  CsvTable u_table = grid_path_table(tc.u, "subordinator");
  u_table.metadata.push_back(beta_line);
  u_table.metadata.push_back(seed_line);
  write_table(out_dir, "subordinator.csv", u_table, manifest);

  CsvTable e_table = grid_path_table(tc.e, "inverse_clock");
  e_table.metadata.push_back(beta_line);
  e_table.metadata.push_back(seed_line);
  write_table(out_dir, "inverse_clock.csv", e_table, manifest);

  CsvTable b_table = grid_path_table(b, "brownian");
  b_table.metadata.push_back(beta_line);
  b_table.metadata.push_back(seed_line);
  write_table(out_dir, "time_changed_brownian.csv", b_table, manifest);

  CsvTable x_table = vector_path_table(x);
  x_table.metadata.push_back(beta_line);
  x_table.metadata.push_back(seed_line);
  write_table(out_dir, "solution.csv", x_table, manifest);

  write_manifest(manifest, out_dir / "manifest.json");
  std::printf("simulate: wrote %zu outputs to %s\n", manifest.outputs.size(),
              out_dir.string().c_str());
}

void cmd_verify(const VerifyConfig& cfg, const std::filesystem::path& out_dir,
                unsigned threads) {
  RunManifest manifest =
      make_manifest("verify", verify_config_to_json(cfg), cfg.seed, threads);
  nlohmann::json summary;
  summary["checks"] = nlohmann::json::object();
  nlohmann::json warnings = nlohmann::json::array();
  std::vector<std::string> failing;

  if (cfg.ladder.rungs < 3) {
    const std::string w =
        "refinement ladder has fewer than 3 rungs; no fitted order, "
        "residuals are reported without a convergence verdict";
    warnings.push_back(w);
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  }

  // Fixed smooth integrands: nonconstant so both the drift and the noise
  // integrals move, bounded so no path can escape.
  const ScalarFn mu = [](double v) { return std::cos(v); };
  const ScalarFn sigma = [](double v) { return 1.0 + 0.5 * std::sin(v); };

  for (CheckKind kind : cfg.checks) {
    const std::string name = check_kind_config_name(kind);
    nlohmann::json entry;

    if (kind == CheckKind::gronwall_bound) {
      const StableParams params(cfg.ladder.beta);
      CsvTable t;
      t.metadata.push_back("check=gronwall_bound");
      t.metadata.push_back("seed=" + std::to_string(cfg.seed));
      t.columns = {"path", "u0", "k0", "k1", "min_margin", "pass"};
      int violations = 0;
      double worst = std::numeric_limits<double>::infinity();
      for (int i = 0; i < cfg.gronwall_paths; ++i) {
        RngStream rng(cfg.seed, 0x6772ULL + static_cast<std::uint64_t>(i));
        const TimeChange tc =
            make_time_change(params, cfg.ladder.delta0, cfg.ladder.h0,
                             cfg.ladder.horizon, rng);
        const double u0 = 0.1 + 4.9 * rng.uniform_open();
        const double k0 = 2.0 * rng.uniform_open();
        const double k1 = rng.uniform_open();
        const auto k_fn = [k0, k1](double t) {
          const double s = std::sin(t);
          return k0 + k1 * s * s;
        };
        const GronwallResult res = check_gronwall(u0, k_fn, tc);
        if (!res.pass) ++violations;
        worst = std::min(worst, res.min_margin);
        t.rows.push_back({static_cast<double>(i), u0, k0, k1, res.min_margin,
                          res.pass ? 1.0 : 0.0});
      }
      write_table(out_dir, name + ".csv", t, manifest);
      const bool pass = violations == 0;
      entry["pass"] = pass;
      entry["paths"] = cfg.gronwall_paths;
      entry["violations"] = violations;
      entry["min_margin"] = worst;
      if (!pass) failing.push_back(name);
      std::printf("%s: %s (%d/%d paths, min margin %.3g)\n", name.c_str(),
                  pass ? "pass" : "FAIL", cfg.gronwall_paths - violations,
                  cfg.gronwall_paths, worst);
    } else {
      ResidualReport report;
      if (kind == CheckKind::change_of_variable_1) {
        report = check_change_of_variable_1(cfg.ladder, mu, sigma);
      } else if (kind == CheckKind::change_of_variable_2) {
        report = check_change_of_variable_2(cfg.ladder, mu, sigma);
      } else {
        ItoFunction f;
        f.kind = ItoFunction::Kind::exp_calendar;
        f.coeff = 0.3;
        ItoProcess process;
        process.p = [](double s, double, double) { return 0.25 * std::cos(s); };
        process.phi = [](double, double, double x) { return -x; };
        process.psi = [](double, double, double) { return 0.4; };
        process.x0 = 1.0;
        report = check_ito_formula(cfg.ladder, f, process);
      }
      write_table(out_dir, name + ".csv", residual_report_table(report),
                  manifest);
      bool pass = true;
      if (report.fitted_order) {
        pass = *report.fitted_order >= 0.4;
        entry["fitted_order"] = *report.fitted_order;
      }
      entry["pass"] = pass;
      entry["max_abs_residual"] = report.max_abs_residual;
      if (!pass) failing.push_back(name);
      if (report.fitted_order) {
        std::printf("%s: %s (fitted order %.3f)\n", name.c_str(),
                    pass ? "pass" : "FAIL", *report.fitted_order);
      } else {
        std::printf("%s: residuals reported, ladder too short for an order\n",
                    name.c_str());
      }
    }
    summary["checks"][name] = std::move(entry);
  }

  summary["all_pass"] = failing.empty();
  summary["warnings"] = std::move(warnings);
  write_json_output(out_dir, "verify_summary.json", summary, manifest);
  write_manifest(manifest, out_dir / "manifest.json");

  if (!failing.empty()) {
    throw VerdictError("failed checks: " + join_names(failing));
  }
}

void cmd_stability(const StabilityConfig& cfg,
                   const std::filesystem::path& out_dir, unsigned threads) {
  ExperimentDesign design = cfg.design;
  design.threads = threads;
  if (cfg.tail_window) design.keep_per_path = true;

  const StabilityAnalysis analysis = run_stability_analysis(design);

  RunManifest manifest = make_manifest(
      "stability", stability_config_to_json(cfg), design.seed, threads);

  for (const auto& curve : analysis.moments) {
    CsvTable t = moment_curve_table(curve);
    t.metadata.push_back("beta=" + format_double(design.beta));
    t.metadata.push_back("seed=" + std::to_string(design.seed));
    t.metadata.push_back("system=" + analysis.report.system_id);
    write_table(out_dir, "moment_p" + p_label(curve.p) + ".csv", t, manifest);
  }

  nlohmann::json report;
  report["system_id"] = analysis.report.system_id;
  nlohmann::json verdicts;
  for (const auto& [name, v] : analysis.report.verdicts) {
    verdicts[name] = verdict_name(v);
  }
  report["verdicts"] = std::move(verdicts);
  report["fitted_rates"] = analysis.report.fitted_rates;
  report["bound_violation_fraction"] =
      analysis.report.bound_violation_fraction;
  report["envelope"] = {{"k_const", analysis.envelope.k_const},
                        {"lambda", analysis.envelope.lambda},
                        {"margin", analysis.envelope.margin}};
  report["design"] = stability_config_to_json(cfg);

  if (cfg.tail_window) {
    RngStream boot_rng(design.seed, design.stream_base + 0xb007ULL);
    const TailFit fit =
        fit_tail_exponent(analysis.moments.front(), cfg.tail_window->first,
                          cfg.tail_window->second, &boot_rng);
    report["tail_fit"] = {
        {"p", analysis.moments.front().p},
        {"slope", fit.slope},
        {"ci_lo", fit.ci_lo},
        {"ci_hi", fit.ci_hi},
        {"kind", fit.kind == DecayKind::power_law ? "power_law"
                                                  : "super_polynomial"}};
  }

  write_json_output(out_dir, "stability_report.json", report, manifest);
  write_manifest(manifest, out_dir / "manifest.json");

  std::vector<std::string> failed;
  for (const auto& [name, v] : analysis.report.verdicts) {
    std::printf("%s: %s\n", name.c_str(), verdict_name(v));
    if (v == Verdict::fail) failed.push_back(name);
  }
  if (!failed.empty()) {
    throw VerdictError("failed verdicts: " + join_names(failed));
  }
}

void cmd_ml_eval(const MlEvalConfig& cfg,
                 const std::filesystem::path& out_dir) {
  CsvTable t;
  t.metadata.push_back("rel_tol=" + format_double(cfg.rel_tol));
  t.columns = {"beta", "z", "value", "est_error", "ok"};
  for (const auto& pt : cfg.points) {
    const MLQuery q(pt.beta, pt.z, cfg.rel_tol);
    try {
      const double v = ml_eval(q);
      t.rows.push_back({pt.beta, pt.z, v, cfg.rel_tol, 1.0});
    } catch (const AccuracyError& e) {
      t.rows.push_back({pt.beta, pt.z,
                        std::numeric_limits<double>::quiet_NaN(), e.achieved,
                        0.0});
    }
  }
  RunManifest manifest =
      make_manifest("ml-eval", ml_eval_config_to_json(cfg), 0, 1);
  write_table(out_dir, "ml_values.csv", t, manifest);
  write_manifest(manifest, out_dir / "manifest.json");
  std::fputs(csv_to_string(t).c_str(), stdout);
}

namespace {

int exit_code_for(const Error& e) {
  if (dynamic_cast<const HypothesisError*>(&e) != nullptr) {
    return kExitHypothesis;
  }
  if (dynamic_cast<const VerdictError*>(&e) != nullptr) return kExitVerdict;
  if (dynamic_cast<const BlowUpError*>(&e) != nullptr) return kExitVerdict;
  if (dynamic_cast<const IoError*>(&e) != nullptr) return kExitIo;
  return kExitValidation;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"simulation and verification toolkit for time-changed "
               "differential systems"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "tcsde_out";
  std::optional<std::uint64_t> seed_override;
  std::optional<unsigned> thread_override;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed_override,
                    "seed override (wins over the config)");
    sub->add_option("--threads", thread_override,
                    "worker threads (wins over TCSDE_THREADS and config)");
  };

  add_common(app.add_subcommand(
      "simulate", "sample one subordinator, clock, noise and solution path"));
  add_common(app.add_subcommand(
      "verify", "run the calculus identity checks over refinement ladders"));
  add_common(app.add_subcommand(
      "stability", "Monte Carlo stability verdicts for a configured system"));
  add_common(app.add_subcommand("ml-eval",
                                "evaluate the Mittag-Leffler function"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitValidation;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const nlohmann::json config = load_json_file(config_path);
    const std::filesystem::path dir(out_dir);

    if (name == "simulate") {
      SimulateConfig cfg = simulate_config_from_json(config);
      if (seed_override) cfg.seed = *seed_override;
      cmd_simulate(cfg, dir, resolve_threads(thread_override, cfg.threads));
    } else if (name == "verify") {
      VerifyConfig cfg = verify_config_from_json(config);
      if (seed_override) {
        cfg.seed = *seed_override;
        cfg.ladder.seed = *seed_override;
      }
      cmd_verify(cfg, dir, resolve_threads(thread_override, cfg.threads));
    } else if (name == "stability") {
      StabilityConfig cfg = stability_config_from_json(config);
      if (seed_override) cfg.design.seed = *seed_override;
      cmd_stability(cfg, dir, resolve_threads(thread_override, cfg.threads));
    } else {
      const MlEvalConfig cfg = ml_eval_config_from_json(config);
      cmd_ml_eval(cfg, dir);
    }
    return kExitSuccess;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
}

}  // namespace tcsde
