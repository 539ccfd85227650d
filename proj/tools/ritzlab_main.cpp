// ritzlab CLI: convergence studies, one-off projected spectra, and runtime
// self-verification for the two-sided spectral approximation library.
//
// Exit codes: 0 success (and, for study/demo, every rank met target_tol),
// 1 configuration or operator error, 2 study finished but some rank missed
// target_tol, 3 verification failure.
//
// Output is deliberately free of timestamps and timings so that identical
// runs produce byte-identical bytes, whatever the thread count.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "ritzlab/ritzlab.hpp"

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

int resolve_threads(int flag_value, int config_value) {
  int t = 0;
  if (flag_value > 0) {
    t = flag_value;
  } else if (config_value > 0) {
    t = config_value;
  } else if (const char* env = std::getenv("RITZ_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || parsed < 1)
      throw ritzlab::ConfigInvalid("environment RITZ_THREADS: must be a positive integer");
    t = static_cast<int>(parsed);
  } else {
    t = 1;
  }
  return std::clamp(t, 1, 64);
}

int run_study_flow(const ritzlab::StudyConfig& cfg, int threads_flag,
                   const std::string& output_flag) {
  const int threads = resolve_threads(threads_flag, cfg.threads);
  const ritzlab::ConvergenceReport report = ritzlab::run_study(
      cfg.op, cfg.family, cfg.m, cfg.steps, cfg.target_tol, cfg.prune_tol, threads);

  std::cout << "operator: " << report.operator_description << "\n";
  std::cout << "family: " << report.family_description << "\n";
  std::cout << "m=" << report.m << " steps=" << report.records.size()
            << " target_tol=" << fmt6(report.target_tol) << "\n";

  const ritzlab::StudyRecord& last = report.records.back();
  bool all_converged = true;
  for (int k = 0; k < report.m; ++k) {
    std::cout << "rank " << (k + 1) << ":";
    if (k < static_cast<int>(last.mu_hat.size()))
      std::cout << " mu_hat=" << fmt6(last.mu_hat[k]);
    else
      std::cout << " mu_hat=n/a";
    if (last.small_ok && k < static_cast<int>(last.lambda_hat.size()))
      std::cout << " lambda_hat=" << fmt6(last.lambda_hat[k]);
    if (k < static_cast<int>(last.errors.size()))
      std::cout << " err=" << fmt6(last.errors[k]);
    if (report.converged_at[k] > 0) {
      std::cout << " converged_at=" << report.converged_at[k];
    } else {
      std::cout << " converged_at=never";
      all_converged = false;
    }
    std::cout << "\n";
  }
  std::cout << "pooled monotone: " << (report.monotone_ok ? "yes" : "NO")
            << "  sandwich: " << (report.all_sandwich_ok ? "yes" : "NO")
            << "  skipped steps: ";
  if (report.skipped_steps.empty()) {
    std::cout << "none";
  } else {
    for (std::size_t i = 0; i < report.skipped_steps.size(); ++i)
      std::cout << (i ? "," : "") << report.skipped_steps[i];
  }
  std::cout << "\n";

  const std::string out_path = !output_flag.empty() ? output_flag : cfg.output_path;
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ritzlab::Error("cannot write output file: " + out_path);
    ritzlab::write_csv(report, out);
    std::cout << "csv: " << out_path << "\n";
  } else {
    std::cout << "\n";
    ritzlab::write_csv(report, std::cout);
  }
  return all_converged ? 0 : 2;
}

// Built-in study configurations, identical to the files under configs/.
const std::map<std::string, const char*>& demo_configs() {
  static const std::map<std::string, const char*> demos = {
      {"diag_m3", R"json({
  "operator": {"kind": "diagonal", "rule": {"type": "affine", "offset": 1.0, "slope": 1.0}},
  "family": "truncation",
  "m": 3,
  "steps": 8,
  "target_tol": 1e-6
})json"},
      {"laplace_m2", R"json({
  "operator": {"kind": "dirichlet_laplacian", "length": "pi", "nodes": 63},
  "family": "mesh_interpolation",
  "m": 2,
  "steps": 6,
  "target_tol": 1e-2
})json"},
      {"harmonic_m3", R"json({
  "operator": {"kind": "schrodinger_1d", "potential": "harmonic", "half_width": 10.0, "nodes": 400},
  "family": "oracle",
  "m": 3,
  "steps": 2,
  "target_tol": 1e-2
})json"}};
  return demos;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-sided eigenvalue approximation: studies, spectra, self-checks"};
  app.require_subcommand(1);

  std::string study_config, study_output;
  int study_threads = 0;
  CLI::App* study = app.add_subcommand("study", "run a convergence study from a JSON config");
  study->add_option("config", study_config, "path to the study JSON config")->required();
  study->add_option("--threads", study_threads,
                    "worker threads for matrix assembly (falls back to RITZ_THREADS, then 1)");
  study->add_option("--output", study_output, "write the CSV here (overrides the config)");

  std::string spectrum_config;
  int spectrum_threads = 0;
  bool spectrum_csv = false;
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "projected spectrum of an explicit trial basis");
  spectrum->add_option("config", spectrum_config, "path to the spectrum JSON config")
      ->required();
  spectrum->add_option("--threads", spectrum_threads, "worker threads for matrix assembly");
  spectrum->add_flag("--csv", spectrum_csv, "emit k,value CSV instead of the readable form");

  std::uint64_t verify_seed = 42;
  int verify_trials = 200;
  CLI::App* verify = app.add_subcommand("verify", "run the randomized self-check suites");
  verify->add_option("--seed", verify_seed, "base seed for the verification stream");
  verify->add_option("--trials", verify_trials, "cases per suite (0 checks nothing)");

  std::string demo_name;
  int demo_threads = 0;
  CLI::App* demo = app.add_subcommand("demo", "run a built-in example study by name");
  demo->add_option("name", demo_name, "demo name (diag_m3, laplace_m2, harmonic_m3)")
      ->required();
  demo->add_option("--threads", demo_threads, "worker threads for matrix assembly");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*study) {
      const ritzlab::json j = ritzlab::load_json_file(study_config);
      return run_study_flow(ritzlab::parse_study_config(j), study_threads, study_output);
    }

    if (*spectrum) {
      const ritzlab::json j = ritzlab::load_json_file(spectrum_config);
      const ritzlab::SpectrumConfig cfg = ritzlab::parse_spectrum_config(j);
      const int threads = resolve_threads(spectrum_threads, cfg.threads);
      const ritzlab::RitzSpectrum rs = ritzlab::ritz_spectrum(cfg.basis, cfg.op, threads);
      if (spectrum_csv) {
        std::cout << "k,value\n";
        for (std::size_t k = 0; k < rs.values.size(); ++k)
          std::cout << (k + 1) << ',' << ritzlab::detail::format_double(rs.values[k])
                    << "\n";
      } else {
        std::cout << "operator: " << cfg.op.description << "\n";
        std::cout << "basis: " << cfg.basis.size() << " vectors\n";
        for (std::size_t k = 0; k < rs.values.size(); ++k)
          std::cout << "theta_" << (k + 1) << " = " << fmt6(rs.values[k]) << "\n";
        std::cout << "gram_condition = " << fmt6(rs.gram_condition) << "\n";
      }
      return 0;
    }

    if (*verify) {
      if (verify_trials == 0) {
        std::cerr << "warning: trials=0, no cases were run\n";
        std::cout << "verify: vacuous pass (0 trials)\n";
        return 0;
      }
      const auto results = ritzlab::run_verify_suites(verify_seed, verify_trials);
      std::cout << "verify: seed=" << verify_seed << " trials=" << verify_trials << "\n";
      bool all_ok = true;
      for (const auto& r : results) {
        std::cout << "suite " << r.name << ": " << r.passed << "/" << r.total;
        if (r.ok) {
          std::cout << " ok\n";
        } else {
          std::cout << " FAIL (" << r.repro << ")\n";
          all_ok = false;
        }
      }
      std::cout << (all_ok ? "verify: all suites passed\n" : "verify: FAILED\n");
      return all_ok ? 0 : 3;
    }

    if (*demo) {
      const auto& demos = demo_configs();
      const auto it = demos.find(demo_name);
      if (it == demos.end()) {
        std::cerr << "error: unknown demo '" << demo_name << "' (available:";
        for (const auto& [name, text] : demos) std::cerr << ' ' << name;
        std::cerr << ")\n";
        return 1;
      }
      std::cout << "demo: " << demo_name << "\n";
      const ritzlab::json j = ritzlab::json::parse(it->second);
      return run_study_flow(ritzlab::parse_study_config(j), demo_threads, "");
    }
  } catch (const ritzlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
