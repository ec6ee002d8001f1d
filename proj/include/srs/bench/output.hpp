#pragma once

// File emission: atomic writes and the CSV schemas of the solver outputs.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include "srs/accuracy.hpp"
#include "srs/error.hpp"
#include "srs/numerical.hpp"
#include "srs/perturbative.hpp"
#include "srs/units.hpp"

namespace srs::bench {

/// Writes `content` to a sibling temp file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

/// Shortest round-trip text for a double.
inline std::string fmt_double(double v) {
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace detail {

template <class Solution>
void append_profile_rows(std::ostringstream& os, const Solution& s, const std::string& suffix) {
  for (std::size_t ch = 0; ch < s.channels(); ++ch) {
    const std::string prefix = std::to_string(ch) + "," + fmt_double(to_thz(s.frequency_hz[ch])) + ",";
    for (std::size_t zi = 0; zi < s.points(); ++zi) {
      os << prefix << fmt_double(s.z_m[zi] / 1e3) << ',' << fmt_double(watt_to_dbm(s.power(ch, zi))) << suffix
         << '\n';
    }
  }
}

}  // namespace detail

/// channel_index,frequency_THz,z_km,power_dBm; rows ordered by channel, then z.
inline std::string power_evolution_csv(const PowerEvolution& e) {
  std::ostringstream os;
  os << "channel_index,frequency_THz,z_km,power_dBm\n";
  detail::append_profile_rows(os, e, "");
  return os.str();
}

/// Same columns plus `order`; one block per truncated solution.
inline std::string truncated_solutions_csv(const std::vector<TruncatedSolution>& solutions) {
  std::ostringstream os;
  os << "channel_index,frequency_THz,z_km,power_dBm,order\n";
  for (const auto& s : solutions) detail::append_profile_rows(os, s, "," + std::to_string(s.order));
  return os.str();
}

/// channel_index,frequency_THz,order,error_dB at one z.
inline std::string error_csv(const std::vector<double>& frequency_hz, const std::vector<ErrorReport>& reports) {
  std::ostringstream os;
  os << "channel_index,frequency_THz,z_km,order,error_dB\n";
  for (const auto& r : reports) {
    for (std::size_t ch = 0; ch < r.error_db.size(); ++ch) {
      os << ch << ',' << fmt_double(to_thz(frequency_hz[ch])) << ',' << fmt_double(r.z_m / 1e3) << ',' << r.order
         << ',' << fmt_double(r.error_db[ch]) << '\n';
    }
  }
  return os.str();
}

}  // namespace srs::bench
