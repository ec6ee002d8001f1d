#pragma once

// Perturbative solution of the SRS equations in the log domain.
//
// With P_ch(z) = P_ch e^{-alpha_ch z} exp(Gamma_ch(z)), Gamma is expanded as
// sum_k Gamma^(k), where Gamma^(k) is homogeneous of degree k in the launch
// powers. Order 1 is closed form:
//   Gamma^(1)_ch(z) = sum_o g(ch, o) P_o Lambda(z, alpha_o)
// and every higher order is a spatial integral of the lower ones:
//   Gamma^(k)_ch(z) = int_0^z sum_o g(ch, o) P_o e^{-alpha_o z'} C_{k-1, o}(z') dz'
//   C_m = sum over partitions {n_j} of m of prod_j (Gamma^(j))^{n_j} / n_j!

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srs/error.hpp"
#include "srs/partitions.hpp"
#include "srs/span_problem.hpp"
#include "srs/units.hpp"

namespace srs {

/// Lambda(z) = (1 - e^{-alpha z}) / alpha, with Lambda -> z as alpha -> 0.
inline double effective_length(double alpha, double z) {
  if (alpha < 0.0) throw DomainError("effective_length: alpha must be >= 0");
  const double x = alpha * z;
  if (x < 1e-6) return z * (1.0 - x / 2.0 + x * x / 6.0);
  return -std::expm1(-x) / alpha;
}

namespace detail {

// int_0^z u e^{-a u} du
inline double first_moment(double a, double z) {
  const double x = a * z;
  if (x < 1e-3) return z * z * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0 + x * x * x * x / 144.0);
  return (1.0 - std::exp(-x) * (1.0 + x)) / (a * a);
}

// int_0^z u^2 e^{-a u} du
inline double second_moment(double a, double z) {
  const double x = a * z;
  if (x < 1e-2) return z * z * z * (1.0 / 3.0 - x / 4.0 + x * x / 10.0 - x * x * x / 36.0);
  return (2.0 - std::exp(-x) * (x * x + 2.0 * x + 2.0)) / (a * a * a);
}

}  // namespace detail

/// int_0^z e^{-a_outer u} Lambda(u, a_inner) du, the z-kernel of the closed-form second order.
inline double loss_weighted_length(double a_outer, double a_inner, double z) {
  if (a_inner * z >= 1e-6) {
    return (effective_length(a_outer, z) - effective_length(a_outer + a_inner, z)) / a_inner;
  }
  return detail::first_moment(a_outer, z) - 0.5 * a_inner * detail::second_moment(a_outer, z);
}

enum class QuadratureRule {
  /// Composite trapezoid on the full integrand.
  Trapezoid,
  /// Product rule: the e^{-alpha z} factor is integrated exactly, the
  /// remaining polynomial in Gamma is interpolated linearly per interval.
  LossWeighted,
};

inline const char* to_string(QuadratureRule r) {
  return r == QuadratureRule::Trapezoid ? "trapezoid" : "loss-weighted";
}

inline QuadratureRule quadrature_rule_from_string(const std::string& s) {
  if (s == "trapezoid") return QuadratureRule::Trapezoid;
  if (s == "loss-weighted") return QuadratureRule::LossWeighted;
  throw DomainError("unknown quadrature rule '" + s + "'");
}

struct PerturbativeSettings {
  double quadrature_step_m = 1000.0;
  QuadratureRule rule = QuadratureRule::Trapezoid;
  /// Abort an order whose estimated quadrature error exceeds this (dB); 0 disables.
  double quadrature_tolerance_db = 0.0;
};

/// Uniform grid on [0, length] with spacing <= step and an even interval count
/// (so a Richardson estimate on every other node is available).
inline std::vector<double> quadrature_grid(double length, double step) {
  if (!(length >= 0.0)) throw DomainError("quadrature_grid: length must be >= 0");
  if (!(step > 0.0)) throw DomainError("quadrature_grid: step must be positive");
  if (length == 0.0) return {0.0};
  auto n = static_cast<std::size_t>(std::ceil(length / step - 1e-9));
  n = std::max<std::size_t>(n, 1);
  if (n > 1 && n % 2 == 1) ++n;
  std::vector<double> z(n + 1);
  for (std::size_t i = 0; i <= n; ++i) z[i] = length * static_cast<double>(i) / static_cast<double>(n);
  z[n] = length;
  return z;
}

/// Gamma^(k)_ch on a spatial grid, k = 1..max_order(). Storage per order is
/// z-major: value(k, ch, zi) = gamma[k - 1][zi * channels + ch].
struct PerturbativeOrders {
  std::vector<double> z_m;
  std::size_t channels = 0;
  std::vector<std::vector<double>> gamma;
  /// Estimated span-end quadrature error per order (nepers); 0 for closed-form orders.
  std::vector<double> quadrature_error;
  /// e^{-alpha_ch z_i}, cached for the higher orders.
  std::vector<double> decay;

  int max_order() const { return static_cast<int>(gamma.size()); }
  std::size_t points() const { return z_m.size(); }

  double value(int k, std::size_t ch, std::size_t zi) const {
    return gamma[static_cast<std::size_t>(k - 1)][zi * channels + ch];
  }

  std::span<const double> at(int k, std::size_t zi) const {
    return {gamma[static_cast<std::size_t>(k - 1)].data() + zi * channels, channels};
  }

  /// Linear interpolation in z.
  double interpolate(int k, std::size_t ch, double z) const {
    if (z <= z_m.front()) return value(k, ch, 0);
    if (z >= z_m.back()) return value(k, ch, points() - 1);
    auto it = std::upper_bound(z_m.begin(), z_m.end(), z);
    const auto hi = static_cast<std::size_t>(it - z_m.begin());
    const std::size_t lo = hi - 1;
    const double t = (z - z_m[lo]) / (z_m[hi] - z_m[lo]);
    return value(k, ch, lo) + t * (value(k, ch, hi) - value(k, ch, lo));
  }

  /// max over channels and grid points of |Gamma^(k)|.
  double max_abs(int k) const {
    double m = 0.0;
    for (double v : gamma[static_cast<std::size_t>(k - 1)]) m = std::max(m, std::abs(v));
    return m;
  }
};

inline PerturbativeOrders gamma_first_order(const SpanProblem& problem, std::vector<double> z_grid) {
  if (z_grid.empty() || z_grid.front() != 0.0) throw DomainError("gamma_first_order: grid must start at z = 0");
  const std::size_t n = problem.size();
  PerturbativeOrders out;
  out.channels = n;
  out.z_m = std::move(z_grid);
  const std::size_t m = out.z_m.size();
  out.decay.resize(m * n);
  std::vector<double> gamma(m * n, 0.0);
  std::vector<double> weighted(n);
  for (std::size_t zi = 0; zi < m; ++zi) {
    const double z = out.z_m[zi];
    for (std::size_t o = 0; o < n; ++o) {
      out.decay[zi * n + o] = std::exp(-problem.alpha[o] * z);
      weighted[o] = problem.launch_w[o] * effective_length(problem.alpha[o], z);
    }
    if (zi > 0) problem.gain.multiply(weighted, std::span<double>(gamma.data() + zi * n, n));
  }
  out.gamma.push_back(std::move(gamma));
  out.quadrature_error.push_back(0.0);
  return out;
}

inline PerturbativeOrders gamma_first_order(const SpanProblem& problem, const PerturbativeSettings& settings) {
  return gamma_first_order(problem, quadrature_grid(problem.length_m, settings.quadrature_step_m));
}

namespace detail {

/// C_m(z_i, ch) for all channels at one grid point.
inline void source_polynomial(const PerturbativeOrders& orders, int m, std::size_t zi, std::span<double> out) {
  const std::size_t n = orders.channels;
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& term : partition_terms(m)) {
    for (std::size_t ch = 0; ch < n; ++ch) {
      double product = term.weight;
      for (const auto& [j, power] : term.factors) {
        const double g = orders.value(j, ch, zi);
        for (int p = 0; p < power; ++p) product *= g;
      }
      out[ch] += product;
    }
  }
}

// int_0^1 e^{-x t} (1 - t) dt and int_0^1 e^{-x t} t dt
inline void loss_weights(double x, double& w_start, double& w_end) {
  if (x < 1e-2) {
    w_start = 0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0 + x * x * x * x / 720.0;
    w_end = 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0 + x * x * x * x / 144.0;
    return;
  }
  const double e = std::exp(-x);
  w_start = (x - 1.0 + e) / (x * x);
  w_end = (1.0 - e * (1.0 + x)) / (x * x);
}

inline double interval_integral(QuadratureRule rule, double h, double alpha, double power, double decay_start,
                                double decay_end, double c_start, double c_end) {
  if (rule == QuadratureRule::Trapezoid) return 0.5 * h * power * (decay_start * c_start + decay_end * c_end);
  double w0 = 0.0, w1 = 0.0;
  loss_weights(alpha * h, w0, w1);
  return h * power * decay_start * (w0 * c_start + w1 * c_end);
}

}  // namespace detail

/// Appends the next order to `previous` by spatial quadrature over its grid.
inline PerturbativeOrders gamma_next_order(PerturbativeOrders previous, const SpanProblem& problem,
                                           const PerturbativeSettings& settings = {}) {
  const int k = previous.max_order() + 1;
  if (k < 2) throw DomainError("gamma_next_order: first order missing");
  const std::size_t n = previous.channels;
  if (n != problem.size()) throw DomainError("gamma_next_order: channel count mismatch");
  const std::size_t m = previous.points();

  std::vector<double> source(m * n);
  for (std::size_t zi = 0; zi < m; ++zi) {
    detail::source_polynomial(previous, k - 1, zi, std::span<double>(source.data() + zi * n, n));
  }

  std::vector<double> gamma(m * n, 0.0);
  std::vector<double> cumulative(n, 0.0);
  for (std::size_t zi = 1; zi < m; ++zi) {
    const double h = previous.z_m[zi] - previous.z_m[zi - 1];
    for (std::size_t o = 0; o < n; ++o) {
      cumulative[o] += detail::interval_integral(settings.rule, h, problem.alpha[o], problem.launch_w[o],
                                                 previous.decay[(zi - 1) * n + o], previous.decay[zi * n + o],
                                                 source[(zi - 1) * n + o], source[zi * n + o]);
    }
    problem.gain.multiply(cumulative, std::span<double>(gamma.data() + zi * n, n));
  }

  // Richardson estimate from the same rule on every other node.
  double estimate = 0.0;
  const std::size_t intervals = m - 1;
  if (intervals >= 2 && intervals % 2 == 0) {
    std::vector<double> coarse(n, 0.0), diff(n), delta(n);
    for (std::size_t zi = 2; zi < m; zi += 2) {
      const double h = previous.z_m[zi] - previous.z_m[zi - 2];
      for (std::size_t o = 0; o < n; ++o) {
        coarse[o] += detail::interval_integral(settings.rule, h, problem.alpha[o], problem.launch_w[o],
                                               previous.decay[(zi - 2) * n + o], previous.decay[zi * n + o],
                                               source[(zi - 2) * n + o], source[zi * n + o]);
      }
    }
    for (std::size_t o = 0; o < n; ++o) diff[o] = cumulative[o] - coarse[o];
    problem.gain.multiply(diff, delta);
    for (double d : delta) estimate = std::max(estimate, std::abs(d) / 3.0);
  }
  if (settings.quadrature_tolerance_db > 0.0 && estimate * kNeperToDb > settings.quadrature_tolerance_db) {
    const double step = intervals > 0 ? previous.z_m.back() / static_cast<double>(intervals) : 0.0;
    throw QuadratureError(k, estimate * kNeperToDb, step, settings.quadrature_tolerance_db);
  }

  previous.gamma.push_back(std::move(gamma));
  previous.quadrature_error.push_back(estimate);
  return previous;
}

/// Orders 1..k on the settings' grid.
inline PerturbativeOrders compute_orders(const SpanProblem& problem, int k, const PerturbativeSettings& settings = {}) {
  if (k < 1) throw DomainError("compute_orders: k must be >= 1");
  auto orders = gamma_first_order(problem, settings);
  while (orders.max_order() < k) orders = gamma_next_order(std::move(orders), problem, settings);
  return orders;
}

/// Closed-form Gamma^(2) at distance z (double frequency sum, no spatial quadrature).
inline std::vector<double> gamma_second_order_analytic(const SpanProblem& problem, double z) {
  const std::size_t n = problem.size();
  std::vector<double> inner(n, 0.0), out(n, 0.0);
  // inner(o) = sum_q g(o, q) P_q K(alpha_o, alpha_q, z)
  for (std::size_t o = 0; o < n; ++o) {
    double acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      const double g = problem.gain(o, q);
      if (g == 0.0) continue;
      acc += g * problem.launch_w[q] * loss_weighted_length(problem.alpha[o], problem.alpha[q], z);
    }
    inner[o] = acc * problem.launch_w[o];
  }
  problem.gain.multiply(inner, out);
  return out;
}

/// Power profile built from orders 1..order.
struct TruncatedSolution {
  int order = 0;
  std::vector<double> z_m;
  std::vector<double> frequency_hz;
  std::vector<double> power_w;  // z-major

  std::size_t channels() const { return frequency_hz.size(); }
  std::size_t points() const { return z_m.size(); }
  double power(std::size_t ch, std::size_t zi) const { return power_w[zi * channels() + ch]; }
  std::span<const double> profile_at(std::size_t zi) const {
    return {power_w.data() + zi * channels(), channels()};
  }
  std::vector<double> final_profile() const {
    auto last = profile_at(points() - 1);
    return {last.begin(), last.end()};
  }
};

inline TruncatedSolution truncated_power_profile(const PerturbativeOrders& orders, const SpanProblem& problem, int k) {
  if (k < 0 || k > orders.max_order()) {
    throw DomainError("truncated_power_profile: order " + std::to_string(k) + " not available (max " +
                      std::to_string(orders.max_order()) + ")");
  }
  const std::size_t n = orders.channels;
  TruncatedSolution out;
  out.order = k;
  out.z_m = orders.z_m;
  out.frequency_hz = problem.frequency_hz;
  out.power_w.resize(orders.points() * n);
  for (std::size_t zi = 0; zi < orders.points(); ++zi) {
    for (std::size_t ch = 0; ch < n; ++ch) {
      double exponent = -problem.alpha[ch] * orders.z_m[zi];
      for (int j = 1; j <= k; ++j) exponent += orders.value(j, ch, zi);
      out.power_w[zi * n + ch] = zi == 0 ? problem.launch_w[ch] : problem.launch_w[ch] * std::exp(exponent);
    }
  }
  return out;
}

/// Exact solution for flat loss and linear gain g(f, f') = -(f - f') slope:
///   chi(z, f) = P e^{-f slope P Lambda} / sum_o P_o e^{-f_o slope P Lambda}
/// Returns P_ch e^{-alpha z} chi(z, f_ch).
inline std::vector<double> closed_form_flat_triangular(const std::vector<double>& frequency_hz,
                                                       const std::vector<double>& launch_w, double alpha,
                                                       double slope, double z) {
  const std::size_t n = frequency_hz.size();
  if (launch_w.size() != n) throw DomainError("closed_form_flat_triangular: size mismatch");
  double total = 0.0, mean_f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += launch_w[i];
    mean_f += frequency_hz[i];
  }
  mean_f /= static_cast<double>(n);
  const double scale = slope * total * effective_length(alpha, z);
  // chi is invariant under a common frequency shift; centring keeps exponents small.
  std::vector<double> exponent(n);
  double max_e = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    exponent[i] = -(frequency_hz[i] - mean_f) * scale;
    max_e = std::max(max_e, exponent[i]);
  }
  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) denom += launch_w[i] * std::exp(exponent[i] - max_e);
  const double decay = std::exp(-alpha * z);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = launch_w[i] * decay * total * std::exp(exponent[i] - max_e) / denom;
  return out;
}

}  // namespace srs
