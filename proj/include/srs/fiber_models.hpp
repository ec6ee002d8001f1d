#pragma once

// Frequency-dependent fiber parameters: intrinsic loss, effective area and
// the scaled Raman gain coefficient between two channels.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "srs/error.hpp"
#include "srs/units.hpp"

namespace srs {

//---------------------------------------------------------------------------//
// Loss coefficient
//---------------------------------------------------------------------------//

struct GaussianPeak {
  double amplitude_db_per_km = 0.0;
  double center_um = 0.0;
  double width_um = 1.0;  // standard deviation
};

/// Parametric (Walker-type) spectral loss model, all terms in dB/km with
/// wavelength in micrometres.
struct LossModelParams {
  double rayleigh_a = 0.0;  // dB um^4 / km
  double rayleigh_b = 0.0;  // dB/km
  double uv_k = 0.0;        // dB/km
  double uv_c = 4.67;       // um
  double ir_k = 0.0;        // dB/km
  double ir_c = 47.8;       // um
  std::vector<GaussianPeak> peaks;

  static constexpr double kMinWavelengthUm = 1.2;
  static constexpr double kMaxWavelengthUm = 1.7;

  void validate() const {
    if (!(rayleigh_a >= 0.0) || !(rayleigh_b >= 0.0) || !(uv_k >= 0.0) || !(ir_k >= 0.0)) {
      throw DomainError("loss model: A, B, K_UV and K_IR must be non-negative");
    }
    for (const auto& p : peaks) {
      if (!(p.width_um > 0.0)) throw DomainError("loss model: absorption peak width must be positive");
      if (!(p.amplitude_db_per_km >= 0.0)) throw DomainError("loss model: absorption peak amplitude must be non-negative");
    }
  }

  /// Relative amplitudes (A_i / A_1) of the 1.39 um OH absorption group.
  /// The OH peak at 1.24 um and the P-OH term are dropped, as they fall
  /// outside the U-to-E window.
  struct OhComponent {
    double relative_amplitude;
    double center_um;
    double width_um;
  };
  static constexpr OhComponent kOh139[] = {
      {7.0e3, 1.383, 0.0155},
      {1.5e3, 1.367, 0.035},
      {1.0e3, 1.412, 0.03},
  };

  /// Five-parameter fit with the remaining constants at their defaults.
  static LossModelParams walker(double a, double b, double k_ir, double a1, double k_uv) {
    LossModelParams p;
    p.rayleigh_a = a;
    p.rayleigh_b = b;
    p.ir_k = k_ir;
    p.uv_k = k_uv;
    for (const auto& c : kOh139) p.peaks.push_back({a1 * c.relative_amplitude, c.center_um, c.width_um});
    p.validate();
    return p;
  }

  /// Fit to a measured standard single-mode fiber.
  static LossModelParams ssmf() { return walker(0.9192, 0.0147, 5.0e11, 0.0043e-3, 1.4655e-16); }
};

/// Loss coefficient in dB/km at `wavelength_um`.
inline double loss_coefficient(const LossModelParams& p, double wavelength_um) {
  if (!(wavelength_um >= LossModelParams::kMinWavelengthUm && wavelength_um <= LossModelParams::kMaxWavelengthUm)) {
    throw DomainError("loss_coefficient: wavelength " + std::to_string(wavelength_um) +
                      " um outside [1.2, 1.7] um");
  }
  const double lam = wavelength_um;
  const double lam2 = lam * lam;
  double alpha = p.rayleigh_a / (lam2 * lam2) + p.rayleigh_b;
  alpha += p.uv_k * std::exp(p.uv_c / lam);
  alpha += p.ir_k * std::exp(-p.ir_c / lam);
  for (const auto& peak : p.peaks) {
    const double d = lam - peak.center_um;
    alpha += peak.amplitude_db_per_km * std::exp(-d * d / (2.0 * peak.width_um * peak.width_um));
  }
  return alpha;
}

/// Evaluated intrinsic loss over frequency, either parametric or flat.
class LossProfile {
 public:
  struct Flat {
    double db_per_km;
  };

  static LossProfile flat(double db_per_km) {
    if (!(db_per_km >= 0.0) || !std::isfinite(db_per_km)) throw DomainError("flat loss must be finite and >= 0");
    return LossProfile(Flat{db_per_km});
  }
  static LossProfile parametric(LossModelParams params) {
    params.validate();
    return LossProfile(std::move(params));
  }

  bool is_flat() const { return std::holds_alternative<Flat>(model_); }
  const LossModelParams* params() const { return std::get_if<LossModelParams>(&model_); }
  double flat_db_per_km() const { return std::get<Flat>(model_).db_per_km; }

  double db_per_km(double frequency_hz) const {
    if (const auto* f = std::get_if<Flat>(&model_)) return f->db_per_km;
    return loss_coefficient(std::get<LossModelParams>(model_), wavelength_um(frequency_hz));
  }

  /// Power attenuation in 1/m.
  double alpha(double frequency_hz) const { return db_per_km_to_per_m(db_per_km(frequency_hz)); }

  std::vector<double> alphas(const std::vector<double>& frequency_hz) const {
    std::vector<double> out;
    out.reserve(frequency_hz.size());
    for (double f : frequency_hz) out.push_back(alpha(f));
    return out;
  }

 private:
  explicit LossProfile(std::variant<Flat, LossModelParams> m) : model_(std::move(m)) {}
  std::variant<Flat, LossModelParams> model_;
};

//---------------------------------------------------------------------------//
// Geometry and effective area
//---------------------------------------------------------------------------//

struct FiberGeometry {
  double core_radius_m = 4.2e-6;
  double core_index = 1.45 / (1.0 - 0.0031);
  double cladding_index = 1.45;
  double relative_index_step = 0.0031;
  double nonlinear_index = 2.6e-20;  // m^2/W

  /// Builds the geometry from the cladding index and the relative step,
  /// deriving the core index so that the step relation holds exactly.
  static FiberGeometry from_cladding(double core_radius_m, double cladding_index, double relative_index_step,
                                     double nonlinear_index = 2.6e-20) {
    FiberGeometry g;
    g.core_radius_m = core_radius_m;
    g.cladding_index = cladding_index;
    g.relative_index_step = relative_index_step;
    g.core_index = cladding_index / (1.0 - relative_index_step);
    g.nonlinear_index = nonlinear_index;
    g.validate();
    return g;
  }

  static FiberGeometry ssmf() { return from_cladding(4.2e-6, 1.45, 0.0031); }

  void validate() const {
    if (!(core_radius_m > 0.0)) throw DomainError("fiber geometry: core radius must be positive");
    if (!(core_index > cladding_index && cladding_index > 1.0)) {
      throw DomainError("fiber geometry: need core index > cladding index > 1");
    }
    if (std::abs(relative_index_step - (core_index - cladding_index) / core_index) > 1e-12) {
      throw DomainError("fiber geometry: relative index step inconsistent with the indices");
    }
  }
};

/// Normalized frequency V at optical frequency `frequency_hz`.
inline double normalized_frequency(const FiberGeometry& g, double frequency_hz) {
  const double k0 = 2.0 * std::numbers::pi * frequency_hz / kSpeedOfLight;
  return k0 * g.core_radius_m * g.core_index * std::sqrt(2.0 * g.relative_index_step);
}

/// Gaussian-mode effective area in m^2: pi w^2 with w = a / sqrt(ln V).
inline double effective_area(const FiberGeometry& g, double frequency_hz) {
  const double v = normalized_frequency(g, frequency_hz);
  if (!(v > 1.0)) {
    throw DomainError("effective_area: normalized frequency V = " + std::to_string(v) +
                      " <= 1, mode radius undefined");
  }
  return std::numbers::pi * g.core_radius_m * g.core_radius_m / std::log(v);
}

//---------------------------------------------------------------------------//
// Raman gain
//---------------------------------------------------------------------------//

/// Signed Raman gain curve g0(shift) measured with a pump at `reference_frequency_hz`.
/// The shift is f' - f (interferer minus channel): positive shifts pump the
/// channel, negative shifts deplete it.
struct RamanGainTable {
  double reference_frequency_hz = 206.185e12;
  std::vector<double> shift_hz;  // ascending
  std::vector<double> g0;        // 1/(W m)
  double polarization_factor = 1.0;

  std::size_t size() const { return shift_hz.size(); }

  void validate() const {
    if (shift_hz.size() != g0.size()) throw DomainError("raman table: column length mismatch");
    if (shift_hz.size() < 2) throw DomainError("raman table: need at least two samples");
    for (std::size_t i = 1; i < shift_hz.size(); ++i) {
      if (!(shift_hz[i] > shift_hz[i - 1])) throw DomainError("raman table: shift grid must be strictly ascending");
    }
    if (!(shift_hz.front() <= 0.0 && shift_hz.back() >= 0.0)) {
      throw DomainError("raman table: shift grid must cover zero shift");
    }
    if (g0_at(0.0) != 0.0) throw DomainError("raman table: g0 at zero shift must be 0");
    for (std::size_t i = 0; i < shift_hz.size(); ++i) {
      if (!std::isfinite(g0[i]) || (shift_hz[i] > 0.0 && g0[i] < 0.0) || (shift_hz[i] < 0.0 && g0[i] > 0.0)) {
        throw DomainError("raman table: g0 must be >= 0 for positive and <= 0 for negative shifts");
      }
    }
    if (!(reference_frequency_hz > 0.0)) throw DomainError("raman table: reference frequency must be positive");
    if (!(polarization_factor >= 0.0)) throw DomainError("raman table: polarization factor must be >= 0");
  }

  /// Linear interpolation; zero outside the tabulated range.
  double g0_at(double shift) const {
    if (shift_hz.empty() || shift < shift_hz.front() || shift > shift_hz.back()) return 0.0;
    auto it = std::upper_bound(shift_hz.begin(), shift_hz.end(), shift);
    if (it == shift_hz.end()) return g0.back();
    const auto hi = static_cast<std::size_t>(it - shift_hz.begin());
    const std::size_t lo = hi - 1;
    if (shift_hz[lo] == shift) return g0[lo];
    // Two-sided form, so a mirrored table gives g0_at(-s) == -g0_at(s) exactly.
    return (g0[lo] * (shift_hz[hi] - shift) + g0[hi] * (shift - shift_hz[lo])) / (shift_hz[hi] - shift_hz[lo]);
  }

  /// Positive shift of the largest gain.
  double peak_shift_hz() const {
    double best = 0.0, best_g = 0.0;
    for (std::size_t i = 0; i < shift_hz.size(); ++i) {
      if (shift_hz[i] > 0.0 && g0[i] > best_g) {
        best_g = g0[i];
        best = shift_hz[i];
      }
    }
    return best;
  }

  /// Copy whose negative half is the exact mirror -g0(-shift) of the positive half.
  RamanGainTable symmetrized() const {
    RamanGainTable out;
    out.reference_frequency_hz = reference_frequency_hz;
    out.polarization_factor = polarization_factor;
    std::vector<std::pair<double, double>> positive;
    for (std::size_t i = 0; i < shift_hz.size(); ++i) {
      if (shift_hz[i] > 0.0) positive.emplace_back(shift_hz[i], g0[i]);
    }
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
      out.shift_hz.push_back(-it->first);
      out.g0.push_back(-it->second);
    }
    out.shift_hz.push_back(0.0);
    out.g0.push_back(0.0);
    for (const auto& [s, g] : positive) {
      out.shift_hz.push_back(s);
      out.g0.push_back(g);
    }
    return out;
  }
};

/// Parses the two-column text format (shift in THz, g0 in 1/(W m)); `#` starts a comment.
inline RamanGainTable parse_raman_table(std::istream& in, const std::string& source,
                                        double reference_frequency_hz = 206.185e12,
                                        double polarization_factor = 1.0) {
  RamanGainTable table;
  table.reference_frequency_hz = reference_frequency_hz;
  table.polarization_factor = polarization_factor;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double shift_thz = 0.0, g = 0.0;
    if (!(row >> shift_thz)) {
      row.clear();
      std::string rest;
      if (row >> rest) throw ParseError(source, line_no, "expected two numeric columns");
      continue;  // blank line
    }
    std::string extra;
    if (!(row >> g) || (row >> extra)) throw ParseError(source, line_no, "expected two numeric columns");
    if (!std::isfinite(shift_thz) || !std::isfinite(g)) throw ParseError(source, line_no, "non-finite value");
    const double shift = thz(shift_thz);
    if (!table.shift_hz.empty() && !(shift > table.shift_hz.back())) {
      throw ParseError(source, line_no, "shift grid not strictly ascending");
    }
    table.shift_hz.push_back(shift);
    table.g0.push_back(g);
  }
  if (table.shift_hz.size() < 2) throw ParseError(source, line_no, "need at least two samples");
  if (!(table.shift_hz.front() <= 0.0 && table.shift_hz.back() >= 0.0)) {
    throw ParseError(source, 0, "shift grid does not bracket zero shift");
  }
  try {
    table.validate();
  } catch (const DomainError& e) {
    throw ParseError(source, 0, e.what());
  }
  return table;
}

inline RamanGainTable load_raman_table(const std::string& path, double reference_frequency_hz = 206.185e12,
                                       double polarization_factor = 1.0) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_raman_table(in, path, reference_frequency_hz, polarization_factor);
}

/// How the pump/Stokes overlap area is formed from the two single-frequency areas.
enum class OverlapRule { ArithmeticMean, GeometricMean };

/// Gain table plus the geometry used to rescale it away from the reference pump.
class RamanGainModel {
 public:
  RamanGainModel(RamanGainTable table, FiberGeometry geometry, bool symmetric_gain = false,
                 OverlapRule overlap = OverlapRule::ArithmeticMean)
      : table_(symmetric_gain ? table.symmetrized() : std::move(table)),
        geometry_(geometry),
        symmetric_(symmetric_gain),
        overlap_(overlap) {
    table_.validate();
    geometry_.validate();
  }

  const RamanGainTable& table() const { return table_; }
  const FiberGeometry& geometry() const { return geometry_; }
  bool symmetric_gain() const { return symmetric_; }
  OverlapRule overlap_rule() const { return overlap_; }

  /// Overlap effective area for a pump at `pump_hz` and a Stokes wave `shift` below it.
  double overlap_area(double shift, double pump_hz) const {
    const double a_pump = effective_area(geometry_, pump_hz);
    const double a_stokes = effective_area(geometry_, pump_hz - shift);
    if (overlap_ == OverlapRule::GeometricMean) return std::sqrt(a_pump * a_stokes);
    return 0.5 * (a_pump + a_stokes);
  }

 private:
  RamanGainTable table_;
  FiberGeometry geometry_;
  bool symmetric_;
  OverlapRule overlap_;
};

/// g_R(f, f') in 1/(W m): gain of channel `f` due to interferer `f_other`.
/// Positive when f < f_other, negative when f > f_other.
inline double raman_gain(const RamanGainModel& model, double f, double f_other) {
  if (f == f_other) return 0.0;
  const auto& table = model.table();
  const double shift = f_other - f;
  const double g0 = table.g0_at(shift);
  if (g0 == 0.0) return 0.0;
  const double pump = std::max(f, f_other);
  const double f_ref = table.reference_frequency_hz;
  const double span = std::abs(shift);
  const double area_ratio = model.overlap_area(span, f_ref) / model.overlap_area(span, pump);
  return table.polarization_factor * g0 * (pump / f_ref) * area_ratio;
}

/// Linear ("triangular") gain g_R(f, f') = -(f - f') * slope.
struct TriangularGain {
  double slope = 0.0;  // 1/(W m Hz)
};

struct NoRamanGain {};

using RamanCoupling = std::variant<RamanGainModel, TriangularGain, NoRamanGain>;

inline double coupling_gain(const RamanCoupling& coupling, double f, double f_other) {
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RamanGainModel>) {
          return raman_gain(c, f, f_other);
        } else if constexpr (std::is_same_v<T, TriangularGain>) {
          return -(f - f_other) * c.slope;
        } else {
          return 0.0;
        }
      },
      coupling);
}

/// One fiber segment.
struct FiberSpan {
  double length_m = 70e3;
  LossProfile loss = LossProfile::flat(0.2);
  RamanCoupling raman = NoRamanGain{};
};

}  // namespace srs
