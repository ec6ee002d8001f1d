#pragma once

// Scenario runs and the bandwidth benchmark sweep.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "srs/accuracy.hpp"
#include "srs/bench/config.hpp"
#include "srs/bench/output.hpp"
#include "srs/bench/svg_plot.hpp"
#include "srs/numerical.hpp"
#include "srs/perturbative.hpp"

namespace srs::bench {

using Logger = std::function<void(const std::string&)>;

//---------------------------------------------------------------------------//
// Timing
//---------------------------------------------------------------------------//

struct Timing {
  double median_s = 0.0;
  std::vector<double> samples_s;
};

/// Median wall time of `fn` over `repetitions`. With `min_sample_s` > 0 each
/// sample averages enough back-to-back calls to last at least that long.
template <class Fn>
Timing time_median(Fn&& fn, int repetitions, double min_sample_s = 0.0) {
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };
  int inner = 1;
  if (min_sample_s > 0.0) {
    const auto t0 = clock::now();
    fn();
    const double once = std::max(seconds(clock::now() - t0), 1e-9);
    inner = std::max(1, static_cast<int>(std::ceil(min_sample_s / once)));
  }
  Timing t;
  for (int r = 0; r < repetitions; ++r) {
    const auto t0 = clock::now();
    for (int i = 0; i < inner; ++i) fn();
    t.samples_s.push_back(seconds(clock::now() - t0) / inner);
  }
  auto sorted = t.samples_s;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  t.median_s = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return t;
}

inline double max_abs_db_difference(const std::vector<double>& a, const std::vector<double>& b) {
  return relative_error(a, b).max_abs_db;
}

//---------------------------------------------------------------------------//
// Single scenario
//---------------------------------------------------------------------------//

struct ScenarioResult {
  json report;
  std::vector<std::string> files;
};

inline ScenarioResult run_scenario(const ScenarioConfig& config, const Logger& log = {}) {
  auto note = [&](const std::string& s) {
    if (log) log(s);
  };
  const auto comb = make_comb(config.spectrum);
  const auto span = make_span(config.fiber);
  const auto& sc = config.solver;

  SpanProblem problem;
  const auto setup = time_median([&] { problem = SpanProblem::prepare(comb, span); }, 1);
  note("comb: " + std::to_string(comb.size()) + " channels, total launch " +
       fmt_double(watt_to_dbm(comb.total_power_w())) + " dBm");

  json report;
  report["report_version"] = 1;
  report["config"] = to_json(config);
  report["comb"] = {{"channels", comb.size()},
                    {"lowest_thz", to_thz(comb[0].frequency_hz)},
                    {"highest_thz", to_thz(comb[comb.size() - 1].frequency_hz)},
                    {"total_launch_dbm", watt_to_dbm(comb.total_power_w())}};
  report["timing"] = {{"setup_s", setup.median_s}};

  const bool want_numerical = sc.mode != SolverMode::Perturbative;
  const bool want_perturbative = sc.mode != SolverMode::Numerical;
  const bool csv = std::find(config.output.formats.begin(), config.output.formats.end(), "csv") !=
                   config.output.formats.end();
  const bool json_out = std::find(config.output.formats.begin(), config.output.formats.end(), "json") !=
                        config.output.formats.end();
  const std::filesystem::path dir(config.output.directory);
  ScenarioResult result;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file_atomic(dir / name, content);
    result.files.push_back((dir / name).string());
  };

  PowerEvolution reference;
  if (want_numerical) {
    const NumericalSettings ns{sc.step_m, sc.scheme, sc.record_step_m};
    note("numerical: " + std::string(to_string(sc.scheme)) + " dz = " + fmt_double(sc.step_m) + " m");
    const auto t = time_median([&] { reference = integrate(problem, ns); }, sc.timing_repetitions);
    report["timing"]["numerical_s"] = t.median_s;
    report["numerical"] = {{"scheme", to_string(sc.scheme)}, {"step_m", sc.step_m}, {"points", reference.points()}};
    if (csv) emit("numerical.csv", power_evolution_csv(reference));
  }

  std::vector<TruncatedSolution> solutions;
  if (want_perturbative) {
    const PerturbativeSettings ps{sc.quadrature_step_m, sc.quadrature_rule, sc.quadrature_tolerance_db};
    PerturbativeOrders orders;
    int order = sc.order;
    json pert;
    pert["tolerance_db"] = sc.tolerance_db;
    pert["quadrature_step_m"] = sc.quadrature_step_m;
    pert["quadrature_rule"] = to_string(sc.quadrature_rule);
    Timing t;
    if (order == 0) {
      OrderSelection sel;
      t = time_median([&] { sel = select_order(problem, sc.tolerance_db, sc.k_max, ps); }, sc.timing_repetitions);
      order = sel.selected_order;
      orders = std::move(sel.orders);
      pert["selection"] = "automatic";
    } else {
      t = time_median(
          [&] {
            orders = compute_orders(problem, order, ps);
            truncated_power_profile(orders, problem, order);
          },
          sc.timing_repetitions);
      pert["selection"] = "fixed";
    }
    report["timing"]["perturbative_s"] = t.median_s;
    pert["selected_order"] = order;
    json per_order = json::array();
    for (int k = 1; k <= orders.max_order(); ++k) {
      const auto b = order_bound(orders, k);
      per_order.push_back({{"order", k},
                           {"theta", b.theta},
                           {"bound_db", b.bound_db},
                           {"max_abs_gamma", orders.max_abs(k)},
                           {"quadrature_error_db", orders.quadrature_error[static_cast<std::size_t>(k - 1)] * kNeperToDb}});
    }
    pert["orders"] = per_order;
    report["perturbative"] = pert;
    note("perturbative: order " + std::to_string(order));
    for (int k = 0; k <= order; ++k) solutions.push_back(truncated_power_profile(orders, problem, k));
    if (csv) emit("perturbative.csv", truncated_solutions_csv(solutions));
  }

  std::vector<ErrorReport> errors;
  if (want_numerical && want_perturbative) {
    json e = json::array();
    for (std::size_t k = 1; k < solutions.size(); ++k) {
      errors.push_back(relative_error(reference, solutions[k], problem.length_m));
      e.push_back({{"order", k}, {"max_abs_db", errors.back().max_abs_db}});
    }
    report["errors_at_span_end"] = e;
    if (csv) emit("errors.csv", error_csv(problem.frequency_hz, errors));
  }

  if (config.output.plots) {
    std::vector<double> f_thz;
    for (double f : problem.frequency_hz) f_thz.push_back(to_thz(f));
    auto dbm = [](std::span<const double> w) {
      std::vector<double> out;
      for (double v : w) out.push_back(watt_to_dbm(v));
      return out;
    };
    std::vector<Series> power = {{"launch", f_thz, dbm(problem.launch_w)}};
    if (want_numerical) power.push_back({"numerical", f_thz, dbm(final_profile(reference))});
    if (want_perturbative) {
      const auto& s = solutions.back();
      power.push_back({"perturbative k=" + std::to_string(s.order), f_thz, dbm(s.final_profile())});
    }
    emit("power_vs_frequency.svg", render_plot(power, PlotKind::PowerVsFrequency, "Power at span end"));
    if (!errors.empty()) {
      std::vector<Series> err;
      for (const auto& r : errors) err.push_back({"k=" + std::to_string(r.order), f_thz, r.error_db});
      emit("error_vs_frequency.svg", render_plot(err, PlotKind::ErrorVsFrequency, "Error of truncated solutions"));
    }
  }
  if (json_out) {
    json files = result.files;
    files.push_back((dir / "report.json").string());
    report["files"] = files;
    emit("report.json", report.dump(2) + "\n");
  }
  result.report = std::move(report);
  return result;
}

//---------------------------------------------------------------------------//
// Bandwidth sweep
//---------------------------------------------------------------------------//

struct BenchResult {
  double bandwidth_thz = 0.0;
  std::size_t channels = 0;
  std::string solver;
  double max_error_db = NAN;  // against the 0.001 dB-converged reference
  double wall_time_s = NAN;
  double setup_time_s = NAN;
  std::string settings;
  std::string status = "ok";
};

struct SweepOptions {
  double from_thz = 2.5;
  double to_thz = 40.0;
  double step_thz = 2.5;
  int workers = 1;
  int timing_repetitions = 7;
  double min_sample_s = 0.05;
  double reference_tolerance_db = 1e-3;
  double reference_start_step_m = 100.0;
  double numerical_start_step_m = 1000.0;
};

inline std::vector<double> sweep_bandwidths(double from, double to, double step) {
  if (!(from > 0.0) || !(step > 0.0) || !(to >= from)) {
    throw DomainError("sweep: need 0 < from <= to and step > 0");
  }
  const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(from + step * static_cast<double>(i));
  return out;
}

struct TunedStep {
  double step_m = 0.0;
  std::vector<double> profile;  // span end at step_m
};

/// Halves the RK4-log step from `start` until the span-end profile moves less
/// than `tolerance_db`; returns the coarser step of the final pair, or the
/// finer one when `keep_finer`.
inline TunedStep tune_numerical_step(const SpanProblem& problem, double start, double tolerance_db, bool keep_finer,
                                     double min_step = 0.05) {
  auto run = [&](double dz) {
    return final_profile(integrate(problem, {dz, Scheme::Rk4Log, problem.length_m}));
  };
  double dz = std::min(start, std::max(problem.length_m, 1e-3));
  auto coarse = run(dz);
  while (true) {
    if (dz / 2 < min_step) throw NumericalError(0, problem.length_m, "step tuning did not converge");
    auto fine = run(dz / 2);
    if (max_abs_db_difference(fine, coarse) < tolerance_db) {
      return keep_finer ? TunedStep{dz / 2, std::move(fine)} : TunedStep{dz, std::move(coarse)};
    }
    dz /= 2;
    coarse = std::move(fine);
  }
}

struct TunedQuadrature {
  double step_m = 0.0;
  OrderSelection selection;
};

/// Halves the quadrature step from half the span until the selected span-end
/// profile moves less than tau / 2; keeps the coarser step.
inline TunedQuadrature tune_quadrature_step(const SpanProblem& problem, double tolerance_db, int k_max,
                                            QuadratureRule rule, double min_step = 1.0) {
  double h = std::max(problem.length_m / 2.0, min_step);
  auto select = [&](double step) { return select_order(problem, tolerance_db, k_max, {step, rule, 0.0}); };
  auto coarse = select(h);
  while (true) {
    if (h / 2 < min_step) throw NumericalError(0, problem.length_m, "quadrature tuning did not converge");
    auto fine = select(h / 2);
    if (max_abs_db_difference(fine.solution.final_profile(), coarse.solution.final_profile()) < tolerance_db / 2) {
      return {h, std::move(coarse)};
    }
    h /= 2;
    coarse = std::move(fine);
  }
}

/// Both solvers at one bandwidth; failures are reported in `status`.
inline std::vector<BenchResult> bench_point(const WdmComb& full_comb, const FiberSpan& span, const SolverConfig& sc,
                                           double bandwidth_thz, const SweepOptions& opt) {
  BenchResult num, pert;
  num.solver = "numerical";
  pert.solver = "perturbative";
  num.bandwidth_thz = pert.bandwidth_thz = bandwidth_thz;
  try {
    const auto comb = full_comb.first_bandwidth(thz(bandwidth_thz));
    num.channels = pert.channels = comb.size();
    SpanProblem problem;
    const auto setup = time_median([&] { problem = SpanProblem::prepare(comb, span); }, 1);
    num.setup_time_s = pert.setup_time_s = setup.median_s;
    const auto reference = tune_numerical_step(problem, opt.reference_start_step_m, opt.reference_tolerance_db, true);

    try {
      const auto tuned = tune_numerical_step(problem, opt.numerical_start_step_m, sc.tolerance_db, false);
      num.max_error_db = max_abs_db_difference(reference.profile, tuned.profile);
      num.settings = "rk4-log dz=" + fmt_double(tuned.step_m) + " m";
      const NumericalSettings ns{tuned.step_m, Scheme::Rk4Log, problem.length_m};
      num.wall_time_s =
          time_median([&] { integrate(problem, ns); }, opt.timing_repetitions, opt.min_sample_s).median_s;
    } catch (const std::exception& e) {
      num.status = e.what();
    }

    try {
      const auto tuned = tune_quadrature_step(problem, sc.tolerance_db, sc.k_max, sc.quadrature_rule);
      pert.max_error_db = max_abs_db_difference(reference.profile, tuned.selection.solution.final_profile());
      pert.settings = "k=" + std::to_string(tuned.selection.selected_order) + " quadrature=" +
                      fmt_double(tuned.step_m) + " m " + to_string(sc.quadrature_rule);
      const PerturbativeSettings ps{tuned.step_m, sc.quadrature_rule, 0.0};
      pert.wall_time_s =
          time_median([&] { select_order(problem, sc.tolerance_db, sc.k_max, ps); }, opt.timing_repetitions,
                      opt.min_sample_s)
              .median_s;
    } catch (const std::exception& e) {
      pert.status = e.what();
    }
  } catch (const std::exception& e) {
    num.status = pert.status = e.what();
  }
  return {num, pert};
}

inline std::vector<BenchResult> run_bandwidth_sweep(const ScenarioConfig& config, const SweepOptions& opt,
                                                    const Logger& log = {}) {
  const auto bandwidths = sweep_bandwidths(opt.from_thz, opt.to_thz, opt.step_thz);
  auto spectrum = config.spectrum;
  spectrum.bandwidth_thz = 0.0;
  const auto full_comb = make_comb(spectrum);
  const auto span = make_span(config.fiber);

  std::vector<std::vector<BenchResult>> rows(bandwidths.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < bandwidths.size(); i = next++) {
      rows[i] = bench_point(full_comb, span, config.solver, bandwidths[i], opt);
      if (log) {
        std::lock_guard lock(log_mutex);
        for (const auto& r : rows[i]) {
          log(fmt_double(r.bandwidth_thz) + " THz " + r.solver + ": " + r.settings + ", error " +
              fmt_double(r.max_error_db) + " dB, " + fmt_double(r.wall_time_s) + " s" +
              (r.status == "ok" ? "" : " [" + r.status + "]"));
        }
      }
    }
  };
  const int workers = std::max(1, std::min<int>(opt.workers, static_cast<int>(bandwidths.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<BenchResult> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

inline std::string sweep_csv(const std::vector<BenchResult>& rows) {
  std::string s = "bandwidth_THz,channels,solver,max_error_dB,wall_time_s,setup_time_s,settings,status\n";
  auto quote = [](const std::string& v) {
    std::string q = "\"";
    for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& r : rows) {
    s += fmt_double(r.bandwidth_thz) + "," + std::to_string(r.channels) + "," + r.solver + "," +
         fmt_double(r.max_error_db) + "," + fmt_double(r.wall_time_s) + "," + fmt_double(r.setup_time_s) + "," +
         quote(r.settings) + "," + quote(r.status) + "\n";
  }
  return s;
}

/// Writes sweep.csv, sweep.json and (optionally) time_vs_bandwidth.svg.
inline std::vector<std::string> write_sweep(const ScenarioConfig& config, const SweepOptions& opt,
                                            const std::vector<BenchResult>& rows) {
  const std::filesystem::path dir(config.output.directory);
  std::vector<std::string> files;
  write_file_atomic(dir / "sweep.csv", sweep_csv(rows));
  files.push_back((dir / "sweep.csv").string());
  json j;
  j["report_version"] = 1;
  j["config"] = to_json(config);
  j["sweep"] = {{"from_thz", opt.from_thz}, {"to_thz", opt.to_thz}, {"step_thz", opt.step_thz},
                {"workers", opt.workers}, {"timing_repetitions", opt.timing_repetitions}};
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"bandwidth_thz", r.bandwidth_thz},
                   {"channels", r.channels},
                   {"solver", r.solver},
                   {"max_error_db", std::isfinite(r.max_error_db) ? json(r.max_error_db) : json()},
                   {"wall_time_s", std::isfinite(r.wall_time_s) ? json(r.wall_time_s) : json()},
                   {"setup_time_s", std::isfinite(r.setup_time_s) ? json(r.setup_time_s) : json()},
                   {"settings", r.settings},
                   {"status", r.status}});
  }
  j["results"] = arr;
  write_file_atomic(dir / "sweep.json", j.dump(2) + "\n");
  files.push_back((dir / "sweep.json").string());
  if (config.output.plots) {
    Series num{"numerical", {}, {}}, pert{"perturbative", {}, {}};
    for (const auto& r : rows) {
      if (r.status != "ok") continue;
      auto& s = r.solver == "numerical" ? num : pert;
      s.x.push_back(r.bandwidth_thz);
      s.y.push_back(r.wall_time_s);
    }
    if (!num.x.empty() || !pert.x.empty()) {
      emit_plot({num, pert}, PlotKind::TimeVsBandwidth, dir / "time_vs_bandwidth.svg", "Solve time per bandwidth");
      files.push_back((dir / "time_vs_bandwidth.svg").string());
    }
  }
  return files;
}

}  // namespace srs::bench
