#pragma once

// Solver input precomputed once per (comb, span): per-channel loss and the
// full channel-pair gain matrix.

#include <cstddef>
#include <span>
#include <vector>

#include "srs/error.hpp"
#include "srs/fiber_models.hpp"
#include "srs/spectrum.hpp"

namespace srs {

/// Dense N x N coupling matrix, column-major. Entry (ch, other) is g_R(f_ch, f_other).
class GainMatrix {
 public:
  GainMatrix() = default;
  explicit GainMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t ch, std::size_t other) const { return data_[other * n_ + ch]; }
  double& at(std::size_t ch, std::size_t other) { return data_[other * n_ + ch]; }

  bool is_zero() const {
    for (double v : data_) {
      if (v != 0.0) return false;
    }
    return true;
  }

  /// y = G x. Accumulates column by column so each y[ch] sees a fixed
  /// summation order independent of vector width.
  void multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n_; ++i) y[i] = 0.0;
    for (std::size_t col = 0; col < n_; ++col) {
      const double xc = x[col];
      const double* column = data_.data() + col * n_;
      double* out = y.data();
      for (std::size_t row = 0; row < n_; ++row) out[row] += column[row] * xc;
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

inline GainMatrix build_gain_matrix(const std::vector<double>& frequency_hz, const RamanCoupling& coupling) {
  GainMatrix g(frequency_hz.size());
  if (std::holds_alternative<NoRamanGain>(coupling)) return g;
  for (std::size_t other = 0; other < frequency_hz.size(); ++other) {
    for (std::size_t ch = 0; ch < frequency_hz.size(); ++ch) {
      if (ch != other) g.at(ch, other) = coupling_gain(coupling, frequency_hz[ch], frequency_hz[other]);
    }
  }
  return g;
}

struct SpanProblem {
  double length_m = 0.0;
  std::vector<double> frequency_hz;
  std::vector<double> alpha;     // 1/m
  std::vector<double> launch_w;  // W
  GainMatrix gain;

  std::size_t size() const { return frequency_hz.size(); }

  static SpanProblem prepare(const WdmComb& comb, const FiberSpan& span) {
    if (!(span.length_m >= 0.0)) throw DomainError("span length must be >= 0");
    SpanProblem p;
    p.length_m = span.length_m;
    p.frequency_hz = comb.frequencies();
    p.alpha = span.loss.alphas(p.frequency_hz);
    p.launch_w = comb.powers();
    p.gain = build_gain_matrix(p.frequency_hz, span.raman);
    return p;
  }

  /// Same span and spectrum with different launch powers.
  SpanProblem with_launch(std::vector<double> power_w) const {
    if (power_w.size() != size()) throw DomainError("with_launch: size mismatch");
    SpanProblem p = *this;
    p.launch_w = std::move(power_w);
    return p;
  }
};

}  // namespace srs
