#pragma once

#include <string>
#include <vector>

#include "srs/fiber_models.hpp"
#include "srs/span_problem.hpp"
#include "srs/spectrum.hpp"

namespace srs::testing {

inline const std::string& table_path() {
  static const std::string p = std::string(SRS_DATA_DIR) + "/raman_ssmf_g0.txt";
  return p;
}

inline std::vector<Band> bands(const std::string& names) {
  std::vector<Band> out;
  for (char c : names) out.push_back(*standard_band(std::string(1, c)));
  return out;
}

inline RamanGainModel ssmf_gain(bool symmetric = false) {
  return RamanGainModel(load_raman_table(table_path()), FiberGeometry::ssmf(), symmetric);
}

/// Evenly spaced comb of n channels starting at f0.
inline WdmComb small_comb(std::size_t n, double f0_hz, double spacing_hz, double dbm) {
  std::vector<Channel> ch;
  for (std::size_t i = 0; i < n; ++i) ch.push_back({i, f0_hz + spacing_hz * static_cast<double>(i), 64e9,
                                                    dbm_to_watt(dbm), "X"});
  return WdmComb(ch, spacing_hz);
}

/// Two channels with an explicit gain matrix.
inline SpanProblem pair_problem(double g01, double g10, double p0, double p1, double a0, double a1, double length) {
  SpanProblem p;
  p.length_m = length;
  p.frequency_hz = {190e12, 200e12};
  p.alpha = {a0, a1};
  p.launch_w = {p0, p1};
  p.gain = GainMatrix(2);
  p.gain.at(0, 1) = g01;
  p.gain.at(1, 0) = g10;
  return p;
}

}  // namespace srs::testing
