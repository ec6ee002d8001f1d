// srs: run SRS scenarios and the bandwidth benchmark from a JSON config.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "srs/bench/config.hpp"
#include "srs/bench/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kConvergence = 3 };

int resolve_workers(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("RC_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring RC_THREADS='" << env << "'\n";
  }
  return 1;
}

void log_line(const std::string& s) { std::cerr << s << '\n'; }

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const srs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const srs::ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return kConvergence;
  } catch (const srs::QuadratureError& e) {
    std::cerr << "quadrature error: " << e.what() << '\n';
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stimulated Raman scattering solver and benchmark"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker count for sweeps (default: RC_THREADS or 1)")->check(CLI::NonNegativeNumber);

  std::string config_path;
  std::vector<std::string> overrides;

  auto* solve = app.add_subcommand("solve", "Run one scenario and write profiles, errors, report and plots");
  solve->add_option("--config", config_path, "Scenario config or a previous report.json")->required();
  solve->add_option("--override", overrides, "Dotted override, e.g. solver.order=4 (repeatable)");

  double from = 2.5, to = 40.0, step = 2.5;
  auto* sweep = app.add_subcommand("sweep", "Time both solvers over growing bandwidths");
  sweep->add_option("--config", config_path, "Scenario config")->required();
  sweep->add_option("--override", overrides, "Dotted override (repeatable)");
  sweep->add_option("--from", from, "First bandwidth in THz")->capture_default_str();
  sweep->add_option("--to", to, "Last bandwidth in THz")->capture_default_str();
  sweep->add_option("--step", step, "Bandwidth step in THz")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check a config and print it fully resolved");
  validate->add_option("--config", config_path, "Scenario config")->required();
  validate->add_option("--override", overrides, "Dotted override (repeatable)");

  CLI11_PARSE(app, argc, argv);

  if (*validate) {
    return guarded([&] {
      const auto cfg = srs::bench::load_config(config_path, overrides);
      srs::bench::validate(cfg);
      std::cout << srs::bench::to_json(cfg).dump(2) << '\n';
      return kOk;
    });
  }
  if (*solve) {
    return guarded([&] {
      const auto cfg = srs::bench::load_config(config_path, overrides);
      srs::bench::validate(cfg);
      const auto result = srs::bench::run_scenario(cfg, log_line);
      if (result.report.contains("perturbative")) {
        std::cout << "selected order: " << result.report["perturbative"]["selected_order"] << '\n';
      }
      if (result.report.contains("errors_at_span_end")) {
        for (const auto& e : result.report["errors_at_span_end"]) {
          std::cout << "k=" << e["order"] << " max |E| = " << e["max_abs_db"].get<double>() << " dB\n";
        }
      }
      for (const auto& f : result.files) std::cout << "wrote " << f << '\n';
      return kOk;
    });
  }
  return guarded([&] {
    const auto cfg = srs::bench::load_config(config_path, overrides);
    srs::bench::validate(cfg);
    srs::bench::SweepOptions opt;
    opt.from_thz = from;
    opt.to_thz = to;
    opt.step_thz = step;
    opt.workers = resolve_workers(threads);
    const auto rows = srs::bench::run_bandwidth_sweep(cfg, opt, log_line);
    for (const auto& f : srs::bench::write_sweep(cfg, opt, rows)) std::cout << "wrote " << f << '\n';
    bool all_ok = true;
    for (const auto& r : rows) all_ok = all_ok && r.status == "ok";
    return all_ok ? kOk : kFailure;
  });
}
