#pragma once

// Reference solver: direct integration of the coupled SRS equations
//   dP_ch/dz = [-alpha_ch + sum_other g_R(ch, other) P_other] P_ch
// advanced in log-power so the loss term is exact and powers stay positive.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srs/error.hpp"
#include "srs/span_problem.hpp"

namespace srs {

enum class Scheme { EulerLog, Rk4Log };

inline const char* to_string(Scheme s) { return s == Scheme::EulerLog ? "euler-log" : "rk4-log"; }

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "euler-log") return Scheme::EulerLog;
  if (s == "rk4-log") return Scheme::Rk4Log;
  throw DomainError("unknown integration scheme '" + s + "'");
}

struct NumericalSettings {
  double step_m = 0.8;
  Scheme scheme = Scheme::Rk4Log;
  /// Spacing of stored profile points; 0 stores every step.
  double record_step_m = 0.0;
};

/// Per-channel power versus distance. Storage is z-major: power(ch, zi) = data[zi * N + ch].
struct PowerEvolution {
  std::vector<double> z_m;
  std::vector<double> frequency_hz;
  std::vector<double> power_w;

  std::size_t channels() const { return frequency_hz.size(); }
  std::size_t points() const { return z_m.size(); }
  double power(std::size_t ch, std::size_t zi) const { return power_w[zi * channels() + ch]; }
  std::span<const double> profile_at(std::size_t zi) const {
    return {power_w.data() + zi * channels(), channels()};
  }
};

namespace detail {

// d(ln P)/dz = -alpha + G exp(ln P)
inline void log_power_rate(const SpanProblem& p, std::span<const double> log_power, std::span<double> power_scratch,
                           std::span<double> rate) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) power_scratch[i] = std::exp(log_power[i]);
  p.gain.multiply(power_scratch, rate);
  for (std::size_t i = 0; i < n; ++i) rate[i] -= p.alpha[i];
}

}  // namespace detail

inline PowerEvolution integrate(const SpanProblem& problem, const NumericalSettings& settings) {
  const std::size_t n = problem.size();
  const double length = problem.length_m;
  if (n == 0) throw DomainError("integrate: empty comb");
  if (!(length >= 0.0)) throw DomainError("integrate: span length must be >= 0");
  if (!(settings.step_m > 0.0)) throw DomainError("integrate: step must be positive");
  for (double p : problem.launch_w) {
    if (!(p > 0.0)) throw DomainError("integrate: launch powers must be positive");
  }

  PowerEvolution out;
  out.frequency_hz = problem.frequency_hz;
  out.z_m.push_back(0.0);
  out.power_w = problem.launch_w;
  if (length == 0.0) return out;

  // Full steps of step_m, then one shortened step to land on the span end.
  const double ratio = length / settings.step_m;
  auto full_steps = static_cast<std::size_t>(std::floor(ratio));
  if (ratio - static_cast<double>(full_steps) > 1.0 - 1e-9) ++full_steps;
  const double remainder = length - static_cast<double>(full_steps) * settings.step_m;
  const bool partial = remainder > 1e-9 * length;
  const std::size_t total_steps = full_steps + (partial ? 1 : 0);
  const std::size_t record_every =
      settings.record_step_m > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(settings.record_step_m / settings.step_m)))
          : 1;

  std::vector<double> y(n), k1(n), k2(n), k3(n), k4(n), tmp(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::log(problem.launch_w[i]);

  for (std::size_t step = 0; step < total_steps; ++step) {
    const double z0 = static_cast<double>(step) * settings.step_m;
    const bool last = step + 1 == total_steps;
    const double z1 = last ? length : static_cast<double>(step + 1) * settings.step_m;
    const double h = z1 - z0;

    detail::log_power_rate(problem, y, scratch, k1);
    if (settings.scheme == Scheme::EulerLog) {
      for (std::size_t i = 0; i < n; ++i) y[i] += h * k1[i];
    } else {
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
      detail::log_power_rate(problem, tmp, scratch, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
      detail::log_power_rate(problem, tmp, scratch, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
      detail::log_power_rate(problem, tmp, scratch, k4);
      for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    for (std::size_t i = 0; i < n; ++i) {
      // exp() overflows above ~709.78 and flushes to zero below ~-745
      if (!std::isfinite(y[i]) || y[i] > 709.0 || y[i] < -745.0) {
        throw NumericalError(i, z1, "integrate: non-finite power");
      }
    }
    if (last || (step + 1) % record_every == 0) {
      out.z_m.push_back(z1);
      for (std::size_t i = 0; i < n; ++i) out.power_w.push_back(std::exp(y[i]));
    }
  }
  return out;
}

inline PowerEvolution integrate(const WdmComb& comb, const FiberSpan& span, const NumericalSettings& settings) {
  return integrate(SpanProblem::prepare(comb, span), settings);
}

/// Per-channel power at the span end.
inline std::vector<double> final_profile(const PowerEvolution& evolution) {
  auto last = evolution.profile_at(evolution.points() - 1);
  return {last.begin(), last.end()};
}

}  // namespace srs
