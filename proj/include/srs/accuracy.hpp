#pragma once

// Error of a truncated solution against the reference and automatic choice
// of the truncation order for a target tolerance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "srs/error.hpp"
#include "srs/numerical.hpp"
#include "srs/perturbative.hpp"
#include "srs/units.hpp"

namespace srs {

struct ErrorReport {
  int order = 0;
  double z_m = 0.0;
  std::vector<double> error_db;  // 10 log10(P_ref / P_candidate) per channel
  double max_abs_db = 0.0;
};

inline ErrorReport relative_error(std::span<const double> reference_w, std::span<const double> candidate_w) {
  if (reference_w.size() != candidate_w.size()) throw DomainError("relative_error: channel count mismatch");
  ErrorReport r;
  r.error_db.resize(reference_w.size());
  for (std::size_t i = 0; i < reference_w.size(); ++i) {
    r.error_db[i] = 10.0 * std::log10(reference_w[i] / candidate_w[i]);
    r.max_abs_db = std::max(r.max_abs_db, std::abs(r.error_db[i]));
  }
  return r;
}

namespace detail {

// Log-linear interpolation of a z-major power matrix.
inline std::vector<double> profile_at_z(const std::vector<double>& z_grid, const std::vector<double>& power_w,
                                        std::size_t channels, double z) {
  const double tol = 1e-9 * std::max(1.0, z_grid.back());
  if (z < z_grid.front() - tol || z > z_grid.back() + tol) {
    throw DomainError("relative_error: z = " + std::to_string(z) + " m outside the solution grid");
  }
  auto it = std::lower_bound(z_grid.begin(), z_grid.end(), z - tol);
  auto idx = static_cast<std::size_t>(it - z_grid.begin());
  std::vector<double> out(channels);
  if (idx < z_grid.size() && std::abs(z_grid[idx] - z) <= tol) {
    for (std::size_t ch = 0; ch < channels; ++ch) out[ch] = power_w[idx * channels + ch];
    return out;
  }
  const std::size_t hi = idx, lo = idx - 1;
  const double t = (z - z_grid[lo]) / (z_grid[hi] - z_grid[lo]);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const double a = std::log(power_w[lo * channels + ch]);
    const double b = std::log(power_w[hi * channels + ch]);
    out[ch] = std::exp(a + t * (b - a));
  }
  return out;
}

inline void check_same_comb(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw DomainError("relative_error: reference and candidate combs differ in size");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1.0) throw DomainError("relative_error: reference and candidate combs differ");
  }
}

}  // namespace detail

/// E_ch = 10 log10(P_ch(z) / P^(k)_ch(z)); both solutions are interpolated
/// log-linearly when z is not a grid point.
inline ErrorReport relative_error(const PowerEvolution& reference, const TruncatedSolution& candidate, double z) {
  detail::check_same_comb(reference.frequency_hz, candidate.frequency_hz);
  const auto ref = detail::profile_at_z(reference.z_m, reference.power_w, reference.channels(), z);
  const auto cand = detail::profile_at_z(candidate.z_m, candidate.power_w, candidate.channels(), z);
  auto r = relative_error(ref, cand);
  r.order = candidate.order;
  r.z_m = z;
  return r;
}

struct OrderBound {
  double theta = 0.0;
  double bound_db = 0.0;
};

/// (10 / ln 10) * (e^theta - sum_{j=0..k} theta^j / j!), evaluated as the
/// positive tail series so small theta does not cancel.
inline double bound_from_theta(double theta, int k) {
  if (theta < 0.0 || k < 0) throw DomainError("bound_from_theta: need theta >= 0 and k >= 0");
  if (theta == 0.0) return 0.0;
  double term = 1.0;
  for (int j = 1; j <= k; ++j) term *= theta / j;
  double tail = 0.0;
  for (int j = k + 1;; ++j) {
    term *= theta / j;
    tail += term;
    if (!std::isfinite(tail)) break;
    if (j > theta && term < 1e-17 * tail) break;
  }
  return kNeperToDb * tail;
}

/// theta^(k) = (k! max_{ch,z} |Gamma^(k)|)^(1/k) over the stored grid.
inline OrderBound order_bound(const PerturbativeOrders& orders, int k) {
  if (k < 1 || k > orders.max_order()) throw DomainError("order_bound: order not available");
  double factorial = 1.0;
  for (int j = 2; j <= k; ++j) factorial *= j;
  OrderBound b;
  b.theta = std::pow(factorial * orders.max_abs(k), 1.0 / k);
  b.bound_db = bound_from_theta(b.theta, k);
  return b;
}

struct OrderSelection {
  double tolerance_db = 0.0;
  int selected_order = 0;
  std::vector<double> theta;     // per computed order, index k - 1
  std::vector<double> bound_db;  // per computed order
  PerturbativeOrders orders;
  TruncatedSolution solution;
};

/// Computes orders one at a time and stops at the first k whose bound is
/// within `tolerance_db`. Throws ConvergenceError after `k_max` orders.
inline OrderSelection select_order(const SpanProblem& problem, double tolerance_db, int k_max,
                                   const PerturbativeSettings& settings = {}) {
  if (!(tolerance_db > 0.0)) throw DomainError("select_order: tolerance must be positive");
  if (k_max < 1) throw DomainError("select_order: k_max must be >= 1");
  OrderSelection sel;
  sel.tolerance_db = tolerance_db;
  sel.orders = gamma_first_order(problem, settings);
  for (int k = 1;; ++k) {
    if (k > 1) sel.orders = gamma_next_order(std::move(sel.orders), problem, settings);
    const auto b = order_bound(sel.orders, k);
    sel.theta.push_back(b.theta);
    sel.bound_db.push_back(b.bound_db);
    if (b.bound_db <= tolerance_db) {
      sel.selected_order = k;
      sel.solution = truncated_power_profile(sel.orders, problem, k);
      return sel;
    }
    if (k >= k_max) {
      std::string msg = "select_order: bound above " + std::to_string(tolerance_db) + " dB up to order " +
                        std::to_string(k_max) + "; theta trace:";
      for (std::size_t j = 0; j < sel.theta.size(); ++j) {
        msg += " k=" + std::to_string(j + 1) + ":" + std::to_string(sel.theta[j]) + "/" +
               std::to_string(sel.bound_db[j]) + "dB";
      }
      throw ConvergenceError(msg, sel.theta, sel.bound_db);
    }
  }
}

inline OrderSelection select_order(const WdmComb& comb, const FiberSpan& span, double tolerance_db, int k_max,
                                   const PerturbativeSettings& settings = {}) {
  return select_order(SpanProblem::prepare(comb, span), tolerance_db, k_max, settings);
}

}  // namespace srs
