#pragma once

// WDM channel combs on a fixed grid over the U/L/C/S/E band plan.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "srs/error.hpp"
#include "srs/units.hpp"

namespace srs {

struct Band {
  std::string name;
  double lowest_hz = 0.0;   // lowest central frequency
  double highest_hz = 0.0;  // highest central frequency
};

/// Band plan on the 75 GHz grid.
inline const std::vector<Band>& standard_bands() {
  static const std::vector<Band> bands = {
      {"U", 180.710e12, 185.510e12}, {"L", 186.010e12, 190.810e12}, {"C", 191.310e12, 196.110e12},
      {"S", 196.610e12, 206.210e12}, {"E", 206.810e12, 221.210e12},
  };
  return bands;
}

inline std::optional<Band> standard_band(const std::string& name) {
  for (const auto& b : standard_bands()) {
    if (b.name == name) return b;
  }
  return std::nullopt;
}

struct Channel {
  std::size_t index = 0;
  double frequency_hz = 0.0;
  double symbol_rate_hz = 64e9;
  double power_w = 0.0;
  std::string band;
};

/// Ordered set of channels, strictly ascending in frequency.
class WdmComb {
 public:
  WdmComb() = default;
  WdmComb(std::vector<Channel> channels, double slot_width_hz)
      : channels_(std::move(channels)), slot_width_hz_(slot_width_hz) {
    validate();
  }

  const std::vector<Channel>& channels() const { return channels_; }
  const Channel& operator[](std::size_t i) const { return channels_[i]; }
  std::size_t size() const { return channels_.size(); }
  bool empty() const { return channels_.empty(); }
  double slot_width_hz() const { return slot_width_hz_; }

  double total_power_w() const {
    double total = 0.0;
    for (const auto& c : channels_) total += c.power_w;
    return total;
  }

  std::vector<double> frequencies() const {
    std::vector<double> out;
    out.reserve(channels_.size());
    for (const auto& c : channels_) out.push_back(c.frequency_hz);
    return out;
  }

  std::vector<double> powers() const {
    std::vector<double> out;
    out.reserve(channels_.size());
    for (const auto& c : channels_) out.push_back(c.power_w);
    return out;
  }

  /// Copy with per-channel powers replaced.
  WdmComb with_powers(const std::vector<double>& power_w) const {
    if (power_w.size() != channels_.size()) throw DomainError("with_powers: size mismatch");
    auto channels = channels_;
    for (std::size_t i = 0; i < channels.size(); ++i) channels[i].power_w = power_w[i];
    return WdmComb(std::move(channels), slot_width_hz_);
  }

  /// Channels whose central frequency lies less than `bandwidth_hz` above the first one.
  WdmComb first_bandwidth(double bandwidth_hz) const {
    std::vector<Channel> channels;
    if (channels_.empty()) return {};
    const double f0 = channels_.front().frequency_hz;
    for (const auto& c : channels_) {
      if (c.frequency_hz - f0 < bandwidth_hz - 1e-3) channels.push_back(c);
    }
    for (std::size_t i = 0; i < channels.size(); ++i) channels[i].index = i;
    return WdmComb(std::move(channels), slot_width_hz_);
  }

 private:
  void validate() const {
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      const auto& c = channels_[i];
      if (c.index != i) throw DomainError("comb: channel indices must be 0-based and ascending");
      if (!(c.symbol_rate_hz > 0.0)) throw DomainError("comb: symbol rate must be positive");
      if (!(c.power_w >= 0.0) || !std::isfinite(c.power_w)) throw DomainError("comb: channel power must be >= 0");
      if (i > 0) {
        const double gap = c.frequency_hz - channels_[i - 1].frequency_hz;
        // 1 Hz slack for grid arithmetic
        if (!(gap > 0.0) || gap < slot_width_hz_ - 1.0) {
          throw DomainError("comb: channels must be ascending and at least one slot apart");
        }
      }
    }
  }

  std::vector<Channel> channels_;
  double slot_width_hz_ = 75e9;
};

struct LaunchSpec {
  double power_dbm = -1.0;
  double symbol_rate_hz = 64e9;
};

/// Places channels at lowest + k * slot up to highest (inclusive) in every band.
inline WdmComb build_comb(std::vector<Band> bands, double slot_width_hz, const LaunchSpec& launch) {
  if (!(slot_width_hz > 0.0)) throw DomainError("build_comb: slot width must be positive");
  if (!std::isfinite(launch.power_dbm)) throw DomainError("build_comb: launch power must be finite");
  std::sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lowest_hz < b.lowest_hz; });
  std::vector<Channel> channels;
  const double power = dbm_to_watt(launch.power_dbm);
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto& band = bands[b];
    if (!(band.highest_hz >= band.lowest_hz)) throw DomainError("build_comb: band " + band.name + " is inverted");
    if (b > 0 && band.lowest_hz - bands[b - 1].highest_hz < slot_width_hz - 1.0) {
      throw DomainError("build_comb: bands " + bands[b - 1].name + " and " + band.name + " overlap");
    }
    const double steps = (band.highest_hz - band.lowest_hz) / slot_width_hz;
    const double n = std::round(steps);
    if (std::abs(steps - n) > 1e-6) {
      throw DomainError("build_comb: band " + band.name + " bounds are not on the " +
                        std::to_string(slot_width_hz / 1e9) + " GHz grid");
    }
    for (long k = 0; k <= static_cast<long>(n); ++k) {
      Channel c;
      c.index = channels.size();
      c.frequency_hz = band.lowest_hz + static_cast<double>(k) * slot_width_hz;
      c.symbol_rate_hz = launch.symbol_rate_hz;
      c.power_w = power;
      c.band = band.name;
      channels.push_back(std::move(c));
    }
  }
  return WdmComb(std::move(channels), slot_width_hz);
}

inline WdmComb flat_launch(const WdmComb& comb, double p_dbm) {
  return comb.with_powers(std::vector<double>(comb.size(), dbm_to_watt(p_dbm)));
}

/// dBm text to watts. Up to 17 significant digits the text is read as a
/// double; longer text (written for powers no double dBm maps onto) is
/// evaluated in extended precision and rounded once.
inline double dbm_text_to_watt(const std::string& text, bool* ok = nullptr) {
  int digits = 0;
  bool in_exponent = false;
  bool leading = true;
  for (char c : text) {
    if (c == 'e' || c == 'E') in_exponent = true;
    if (in_exponent || c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++digits;
  }
  char* end = nullptr;
  double watt = 0.0;
  if (digits <= 17) {
    const double dbm = std::strtod(text.c_str(), &end);
    watt = dbm_to_watt(dbm);
  } else {
    const long double dbm = std::strtold(text.c_str(), &end);
    watt = static_cast<double>(std::pow(10.0L, dbm / 10.0L) * 1e-3L);
  }
  if (ok) *ok = end != text.c_str() && std::isfinite(watt);
  return watt;
}

/// Shortest dBm text that converts back to exactly `watt`.
inline std::string exact_dbm_text(double watt) {
  char buf[64];
  double dbm = watt_to_dbm(watt);
  for (int attempt = 0; attempt < 8; ++attempt) {
    for (int digits = 15; digits <= 17; ++digits) {
      std::snprintf(buf, sizeof buf, "%.*g", digits, dbm);
      if (dbm_text_to_watt(buf) == watt) return buf;
    }
    dbm = dbm_to_watt(dbm) < watt ? std::nextafter(dbm, INFINITY) : std::nextafter(dbm, -INFINITY);
  }
  long double dbm_l = 10.0L * std::log10(static_cast<long double>(watt) * 1e3L);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::snprintf(buf, sizeof buf, "%.21Lg", dbm_l);
    const double back = dbm_text_to_watt(buf);
    if (back == watt) return buf;
    dbm_l = back < watt ? std::nextafter(dbm_l, static_cast<long double>(INFINITY))
                        : std::nextafter(dbm_l, -static_cast<long double>(INFINITY));
  }
  throw Error("cannot represent " + std::to_string(watt) + " W exactly in dBm text");
}

inline void write_launch_profile(const WdmComb& comb, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write launch profile " + path);
  out << "frequency_THz,power_dBm\n";
  char buf[64];
  for (const auto& c : comb.channels()) {
    std::snprintf(buf, sizeof buf, "%.17g", to_thz(c.frequency_hz));
    out << buf << ',' << exact_dbm_text(c.power_w) << '\n';
  }
  if (!out) throw IoError("failed writing launch profile " + path);
}

/// Assigns powers from a `frequency_THz,power_dBm` CSV; every channel must be
/// matched within half a slot and no row may be left over.
inline WdmComb parse_launch_profile(const WdmComb& comb, std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::optional<double>> assigned(comb.size());
  std::vector<std::string> problems;
  std::map<double, std::size_t> seen_frequency;
  const auto freqs = comb.frequencies();
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.find("frequency_THz") != std::string::npos) continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(source, line_no, "expected frequency_THz,power_dBm");
    char* end = nullptr;
    const std::string fs = line.substr(0, comma), ps = line.substr(comma + 1);
    const double f_thz = std::strtod(fs.c_str(), &end);
    if (end == fs.c_str()) throw ParseError(source, line_no, "bad frequency");
    bool power_ok = false;
    const double p_w = dbm_text_to_watt(ps, &power_ok);
    if (!power_ok) throw ParseError(source, line_no, "bad power");
    if (auto [it, inserted] = seen_frequency.emplace(f_thz, line_no); !inserted) {
      problems.push_back("duplicate frequency " + fs + " THz (lines " + std::to_string(it->second) + " and " +
                         std::to_string(line_no) + ")");
      continue;
    }
    const double f = thz(f_thz);
    auto it = std::lower_bound(freqs.begin(), freqs.end(), f);
    std::size_t best = comb.size();
    double best_d = comb.slot_width_hz() / 2.0;
    for (auto cand : {it, it == freqs.begin() ? it : it - 1}) {
      if (cand == freqs.end()) continue;
      const double d = std::abs(*cand - f);
      if (d <= best_d) {
        best_d = d;
        best = static_cast<std::size_t>(cand - freqs.begin());
      }
    }
    if (best == comb.size()) {
      problems.push_back("row at " + fs + " THz matches no channel");
    } else if (assigned[best]) {
      problems.push_back("channel at " + std::to_string(to_thz(freqs[best])) + " THz assigned twice");
    } else {
      assigned[best] = p_w;
    }
  }
  std::vector<double> powers(comb.size());
  for (std::size_t i = 0; i < comb.size(); ++i) {
    if (!assigned[i]) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3f", to_thz(freqs[i]));
      problems.push_back(std::string("missing channel at ") + buf + " THz");
    } else {
      powers[i] = *assigned[i];
    }
  }
  if (!problems.empty()) {
    std::string msg = "launch profile does not match the comb:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ParseError(source, 0, msg);
  }
  return comb.with_powers(powers);
}

inline WdmComb load_launch_profile(const WdmComb& comb, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_launch_profile(comb, in, path);
}

}  // namespace srs
