#pragma once

// Scenario configuration: a JSON document with sections fiber, spectrum,
// solver and output. Every leaf has a default; unknown keys are rejected
// with their dotted path. A run report embeds the resolved config under
// "config", so a report file can be passed back as a config.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "srs/error.hpp"
#include "srs/fiber_models.hpp"
#include "srs/numerical.hpp"
#include "srs/perturbative.hpp"
#include "srs/spectrum.hpp"
#include "srs/units.hpp"

#ifndef SRS_DATA_DIR
#define SRS_DATA_DIR "data"
#endif

namespace srs::bench {

using json = nlohmann::json;

enum class SolverMode { Numerical, Perturbative, Both };

inline const char* to_string(SolverMode m) {
  switch (m) {
    case SolverMode::Numerical: return "numerical";
    case SolverMode::Perturbative: return "perturbative";
    default: return "both";
  }
}

struct LossConfig {
  std::string model = "parametric";  // "flat" | "parametric"
  double flat_db_per_km = 0.2;
  LossModelParams params = LossModelParams::ssmf();
};

struct GeometryConfig {
  double core_radius_um = 4.2;
  double cladding_index = 1.45;
  double relative_index_step = 0.0031;
};

struct RamanConfig {
  std::string model = "table";  // "table" | "triangular" | "none"
  std::string table_path;       // empty: bundled SSMF table
  double reference_frequency_thz = 206.185;
  double polarization_factor = 1.0;
  bool symmetric_gain = false;
  std::string overlap = "arithmetic";  // "arithmetic" | "geometric"
  double triangular_slope = 3e-17;     // 1/(W m Hz)
};

struct FiberConfig {
  double span_length_km = 70.0;
  LossConfig loss;
  GeometryConfig geometry;
  RamanConfig raman;
};

struct SpectrumConfig {
  std::vector<Band> bands = {*standard_band("U"), *standard_band("L"), *standard_band("C"), *standard_band("S"),
                             *standard_band("E")};
  double slot_ghz = 75.0;
  double symbol_rate_ghz = 64.0;
  double power_dbm = -1.0;
  std::string launch_profile;  // CSV path; overrides power_dbm when set
  double bandwidth_thz = 0.0;  // keep only the lowest bandwidth_thz of the comb; 0 keeps all
};

struct SolverConfig {
  SolverMode mode = SolverMode::Both;
  Scheme scheme = Scheme::Rk4Log;
  double step_m = 0.8;
  double record_step_m = 1000.0;
  double quadrature_step_m = 1000.0;
  QuadratureRule quadrature_rule = QuadratureRule::Trapezoid;
  double quadrature_tolerance_db = 0.0;
  double tolerance_db = 0.1;
  int k_max = 20;
  int order = 0;  // 0 selects the order automatically from tolerance_db
  int timing_repetitions = 1;
};

struct OutputConfig {
  std::string directory = "srs_out";
  std::vector<std::string> formats = {"csv", "json"};
  bool plots = true;
};

struct ScenarioConfig {
  FiberConfig fiber;
  SpectrumConfig spectrum;
  SolverConfig solver;
  OutputConfig output;
};

namespace detail {

/// Reads typed leaves from one JSON object, tracking which keys were used.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(child(key), "expected a number");
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(child(key), "expected an integer");
      out = v->get<int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(child(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(child(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(child(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path, what);
}

inline std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return p;
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return std::filesystem::absolute(path).lexically_normal().string();
}

}  // namespace detail

inline std::string bundled_raman_table() { return std::string(SRS_DATA_DIR) + "/raman_ssmf_g0.txt"; }

//---------------------------------------------------------------------------//
// JSON -> config
//---------------------------------------------------------------------------//

inline void read_loss(const json& j, LossConfig& c) {
  detail::ObjectReader r(j, "fiber.loss");
  r.string("model", c.model);
  detail::require(c.model == "flat" || c.model == "parametric", r.child("model"), "must be 'flat' or 'parametric'");
  r.number("flat_db_per_km", c.flat_db_per_km);
  detail::require(c.flat_db_per_km >= 0.0, r.child("flat_db_per_km"), "must be >= 0");
  auto& p = c.params;
  r.number("rayleigh_a", p.rayleigh_a);
  r.number("rayleigh_b", p.rayleigh_b);
  r.number("uv_k", p.uv_k);
  r.number("uv_c", p.uv_c);
  r.number("ir_k", p.ir_k);
  r.number("ir_c", p.ir_c);
  const std::pair<const char*, double> non_negative[] = {
      {"rayleigh_a", p.rayleigh_a}, {"rayleigh_b", p.rayleigh_b}, {"uv_k", p.uv_k}, {"ir_k", p.ir_k}};
  for (const auto& [key, v] : non_negative) detail::require(v >= 0.0, r.child(key), "must be >= 0");
  if (const json* peaks = r.find("peaks")) {
    detail::require(peaks->is_array(), r.child("peaks"), "expected an array");
    p.peaks.clear();
    for (std::size_t i = 0; i < peaks->size(); ++i) {
      const std::string path = r.child("peaks") + "[" + std::to_string(i) + "]";
      detail::ObjectReader pr((*peaks)[i], path);
      GaussianPeak g;
      pr.number("amplitude_db_per_km", g.amplitude_db_per_km);
      pr.number("center_um", g.center_um);
      pr.number("width_um", g.width_um);
      pr.finish();
      detail::require(g.amplitude_db_per_km >= 0.0, path + ".amplitude_db_per_km", "must be >= 0");
      detail::require(g.width_um > 0.0, path + ".width_um", "must be > 0");
      p.peaks.push_back(g);
    }
  }
  r.finish();
}

inline void read_fiber(const json& j, FiberConfig& c, const std::filesystem::path& base) {
  detail::ObjectReader r(j, "fiber");
  r.number("span_length_km", c.span_length_km);
  detail::require(c.span_length_km >= 0.0, "fiber.span_length_km", "must be >= 0");
  if (const json* v = r.find("loss")) read_loss(*v, c.loss);
  if (const json* v = r.find("geometry")) {
    detail::ObjectReader g(*v, "fiber.geometry");
    g.number("core_radius_um", c.geometry.core_radius_um);
    g.number("cladding_index", c.geometry.cladding_index);
    g.number("relative_index_step", c.geometry.relative_index_step);
    g.finish();
  }
  detail::require(c.geometry.core_radius_um > 0.0, "fiber.geometry.core_radius_um", "must be > 0");
  detail::require(c.geometry.cladding_index > 1.0, "fiber.geometry.cladding_index", "must be > 1");
  detail::require(c.geometry.relative_index_step > 0.0 && c.geometry.relative_index_step < 0.5,
                  "fiber.geometry.relative_index_step", "must be in (0, 0.5)");
  if (const json* v = r.find("raman")) {
    detail::ObjectReader g(*v, "fiber.raman");
    auto& rc = c.raman;
    g.string("model", rc.model);
    detail::require(rc.model == "table" || rc.model == "triangular" || rc.model == "none", g.child("model"),
                    "must be 'table', 'triangular' or 'none'");
    g.string("table_path", rc.table_path);
    rc.table_path = detail::resolve_path(rc.table_path, base);
    g.number("reference_frequency_thz", rc.reference_frequency_thz);
    detail::require(rc.reference_frequency_thz > 0.0, g.child("reference_frequency_thz"), "must be > 0");
    g.number("polarization_factor", rc.polarization_factor);
    detail::require(rc.polarization_factor >= 0.0, g.child("polarization_factor"), "must be >= 0");
    g.boolean("symmetric_gain", rc.symmetric_gain);
    g.string("overlap", rc.overlap);
    detail::require(rc.overlap == "arithmetic" || rc.overlap == "geometric", g.child("overlap"),
                    "must be 'arithmetic' or 'geometric'");
    g.number("triangular_slope", rc.triangular_slope);
    g.finish();
  }
  r.finish();
}

inline void read_spectrum(const json& j, SpectrumConfig& c, const std::filesystem::path& base) {
  detail::ObjectReader r(j, "spectrum");
  if (const json* v = r.find("bands")) {
    detail::require(v->is_array() && !v->empty(), "spectrum.bands", "expected a non-empty array");
    c.bands.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "spectrum.bands[" + std::to_string(i) + "]";
      const json& b = (*v)[i];
      if (b.is_string()) {
        auto band = standard_band(b.get<std::string>());
        detail::require(band.has_value(), path, "unknown band '" + b.get<std::string>() + "' (use U, L, C, S, E or an object)");
        c.bands.push_back(*band);
      } else {
        detail::ObjectReader br(b, path);
        Band band;
        double lo = 0.0, hi = 0.0;
        br.string("name", band.name);
        br.number("lowest_thz", lo);
        br.number("highest_thz", hi);
        br.finish();
        detail::require(lo > 0.0 && hi >= lo, path, "need 0 < lowest_thz <= highest_thz");
        band.lowest_hz = thz(lo);
        band.highest_hz = thz(hi);
        c.bands.push_back(band);
      }
    }
  }
  r.number("slot_ghz", c.slot_ghz);
  detail::require(c.slot_ghz > 0.0, "spectrum.slot_ghz", "must be > 0");
  r.number("symbol_rate_ghz", c.symbol_rate_ghz);
  detail::require(c.symbol_rate_ghz > 0.0 && c.symbol_rate_ghz <= c.slot_ghz, "spectrum.symbol_rate_ghz",
                  "must be in (0, slot_ghz]");
  r.number("power_dbm", c.power_dbm);
  r.string("launch_profile", c.launch_profile);
  c.launch_profile = detail::resolve_path(c.launch_profile, base);
  r.number("bandwidth_thz", c.bandwidth_thz);
  detail::require(c.bandwidth_thz >= 0.0, "spectrum.bandwidth_thz", "must be >= 0");
  r.finish();
}

inline void read_solver(const json& j, SolverConfig& c) {
  detail::ObjectReader r(j, "solver");
  std::string s = to_string(c.mode);
  r.string("mode", s);
  if (s == "numerical") c.mode = SolverMode::Numerical;
  else if (s == "perturbative") c.mode = SolverMode::Perturbative;
  else if (s == "both") c.mode = SolverMode::Both;
  else throw ConfigError("solver.mode", "must be 'numerical', 'perturbative' or 'both'");
  s = to_string(c.scheme);
  r.string("scheme", s);
  try {
    c.scheme = scheme_from_string(s);
  } catch (const DomainError& e) {
    throw ConfigError("solver.scheme", e.what());
  }
  r.number("step_m", c.step_m);
  detail::require(c.step_m > 0.0, "solver.step_m", "must be > 0");
  r.number("record_step_m", c.record_step_m);
  detail::require(c.record_step_m >= 0.0, "solver.record_step_m", "must be >= 0");
  r.number("quadrature_step_m", c.quadrature_step_m);
  detail::require(c.quadrature_step_m > 0.0, "solver.quadrature_step_m", "must be > 0");
  s = to_string(c.quadrature_rule);
  r.string("quadrature_rule", s);
  try {
    c.quadrature_rule = quadrature_rule_from_string(s);
  } catch (const DomainError& e) {
    throw ConfigError("solver.quadrature_rule", e.what());
  }
  r.number("quadrature_tolerance_db", c.quadrature_tolerance_db);
  detail::require(c.quadrature_tolerance_db >= 0.0, "solver.quadrature_tolerance_db", "must be >= 0");
  r.number("tolerance_db", c.tolerance_db);
  detail::require(c.tolerance_db > 0.0, "solver.tolerance_db", "must be > 0");
  r.integer("k_max", c.k_max);
  detail::require(c.k_max >= 1 && c.k_max <= 60, "solver.k_max", "must be in [1, 60]");
  r.integer("order", c.order);
  detail::require(c.order >= 0 && c.order <= 60, "solver.order", "must be in [0, 60]");
  r.integer("timing_repetitions", c.timing_repetitions);
  detail::require(c.timing_repetitions >= 1, "solver.timing_repetitions", "must be >= 1");
  r.finish();
}

inline void read_output(const json& j, OutputConfig& c) {
  detail::ObjectReader r(j, "output");
  r.string("directory", c.directory);
  detail::require(!c.directory.empty(), "output.directory", "must not be empty");
  c.directory = detail::resolve_path(c.directory, std::filesystem::current_path());
  if (const json* v = r.find("formats")) {
    detail::require(v->is_array(), "output.formats", "expected an array");
    c.formats.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& f = (*v)[i];
      const std::string path = "output.formats[" + std::to_string(i) + "]";
      detail::require(f.is_string() && (f == "csv" || f == "json"), path, "must be 'csv' or 'json'");
      c.formats.push_back(f.get<std::string>());
    }
  }
  r.boolean("plots", c.plots);
  r.finish();
}

/// Builds a config from JSON. Relative input paths resolve against `base`.
inline ScenarioConfig config_from_json(const json& root, const std::filesystem::path& base = ".") {
  const json& j = root.contains("config") && root.contains("report_version") ? root.at("config") : root;
  ScenarioConfig c;
  detail::ObjectReader r(j, "");
  if (const json* v = r.find("fiber")) read_fiber(*v, c.fiber, base);
  if (const json* v = r.find("spectrum")) read_spectrum(*v, c.spectrum, base);
  if (const json* v = r.find("solver")) read_solver(*v, c.solver);
  if (const json* v = r.find("output")) read_output(*v, c.output);
  r.finish();
  if (c.output.directory.empty() || std::filesystem::path(c.output.directory).is_relative()) {
    c.output.directory = detail::resolve_path(c.output.directory.empty() ? "srs_out" : c.output.directory,
                                              std::filesystem::current_path());
  }
  if (c.fiber.raman.model == "table" && c.fiber.raman.table_path.empty()) {
    c.fiber.raman.table_path = bundled_raman_table();
  }
  return c;
}

//---------------------------------------------------------------------------//
// config -> JSON (fully resolved)
//---------------------------------------------------------------------------//

inline json to_json(const ScenarioConfig& c) {
  json peaks = json::array();
  for (const auto& p : c.fiber.loss.params.peaks) {
    peaks.push_back({{"amplitude_db_per_km", p.amplitude_db_per_km}, {"center_um", p.center_um},
                     {"width_um", p.width_um}});
  }
  const auto& lp = c.fiber.loss.params;
  json bands = json::array();
  for (const auto& b : c.spectrum.bands) {
    bands.push_back({{"name", b.name}, {"lowest_thz", to_thz(b.lowest_hz)}, {"highest_thz", to_thz(b.highest_hz)}});
  }
  const auto& rc = c.fiber.raman;
  return {
      {"fiber",
       {{"span_length_km", c.fiber.span_length_km},
        {"loss",
         {{"model", c.fiber.loss.model},
          {"flat_db_per_km", c.fiber.loss.flat_db_per_km},
          {"rayleigh_a", lp.rayleigh_a},
          {"rayleigh_b", lp.rayleigh_b},
          {"uv_k", lp.uv_k},
          {"uv_c", lp.uv_c},
          {"ir_k", lp.ir_k},
          {"ir_c", lp.ir_c},
          {"peaks", peaks}}},
        {"geometry",
         {{"core_radius_um", c.fiber.geometry.core_radius_um},
          {"cladding_index", c.fiber.geometry.cladding_index},
          {"relative_index_step", c.fiber.geometry.relative_index_step}}},
        {"raman",
         {{"model", rc.model},
          {"table_path", rc.table_path},
          {"reference_frequency_thz", rc.reference_frequency_thz},
          {"polarization_factor", rc.polarization_factor},
          {"symmetric_gain", rc.symmetric_gain},
          {"overlap", rc.overlap},
          {"triangular_slope", rc.triangular_slope}}}}},
      {"spectrum",
       {{"bands", bands},
        {"slot_ghz", c.spectrum.slot_ghz},
        {"symbol_rate_ghz", c.spectrum.symbol_rate_ghz},
        {"power_dbm", c.spectrum.power_dbm},
        {"launch_profile", c.spectrum.launch_profile},
        {"bandwidth_thz", c.spectrum.bandwidth_thz}}},
      {"solver",
       {{"mode", to_string(c.solver.mode)},
        {"scheme", to_string(c.solver.scheme)},
        {"step_m", c.solver.step_m},
        {"record_step_m", c.solver.record_step_m},
        {"quadrature_step_m", c.solver.quadrature_step_m},
        {"quadrature_rule", to_string(c.solver.quadrature_rule)},
        {"quadrature_tolerance_db", c.solver.quadrature_tolerance_db},
        {"tolerance_db", c.solver.tolerance_db},
        {"k_max", c.solver.k_max},
        {"order", c.solver.order},
        {"timing_repetitions", c.solver.timing_repetitions}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}, {"plots", c.output.plots}}},
  };
}

//---------------------------------------------------------------------------//
// Loading and overrides
//---------------------------------------------------------------------------//

/// Applies `a.b.c=value` to a JSON document. The value is parsed as JSON when
/// possible and taken as a plain string otherwise.
inline void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(assignment, "override must look like key.path=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(key, "empty path component");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& next = (*node)[part];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError(key.substr(0, dot), "is not an object");
    node = &next;
    start = dot + 1;
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
}

inline ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  json doc = read_json_file(path);
  if (doc.contains("config") && doc.contains("report_version")) doc = doc.at("config");
  for (const auto& o : overrides) apply_override(doc, o);
  const auto base = std::filesystem::absolute(path).parent_path();
  return config_from_json(doc, base);
}

//---------------------------------------------------------------------------//
// Building solver inputs
//---------------------------------------------------------------------------//

inline FiberSpan make_span(const FiberConfig& c) {
  FiberSpan span;
  span.length_m = c.span_length_km * 1e3;
  span.loss = c.loss.model == "flat" ? LossProfile::flat(c.loss.flat_db_per_km) : LossProfile::parametric(c.loss.params);
  const auto& rc = c.raman;
  if (rc.model == "none") {
    span.raman = NoRamanGain{};
  } else if (rc.model == "triangular") {
    span.raman = TriangularGain{rc.triangular_slope};
  } else {
    auto table = load_raman_table(rc.table_path.empty() ? bundled_raman_table() : rc.table_path,
                                  thz(rc.reference_frequency_thz), rc.polarization_factor);
    const auto geometry = FiberGeometry::from_cladding(c.geometry.core_radius_um * 1e-6, c.geometry.cladding_index,
                                                       c.geometry.relative_index_step);
    span.raman = RamanGainModel(std::move(table), geometry, rc.symmetric_gain,
                                rc.overlap == "geometric" ? OverlapRule::GeometricMean : OverlapRule::ArithmeticMean);
  }
  return span;
}

inline WdmComb make_comb(const SpectrumConfig& c) {
  auto comb = build_comb(c.bands, c.slot_ghz * kGiga, {c.power_dbm, c.symbol_rate_ghz * kGiga});
  if (c.bandwidth_thz > 0.0) comb = comb.first_bandwidth(thz(c.bandwidth_thz));
  if (!c.launch_profile.empty()) comb = load_launch_profile(comb, c.launch_profile);
  return comb;
}

/// Validates everything a run needs, including referenced files.
inline void validate(const ScenarioConfig& c) {
  try {
    make_span(c.fiber);
  } catch (const ParseError& e) {
    throw ConfigError("fiber.raman.table_path", e.what());
  } catch (const DomainError& e) {
    throw ConfigError("fiber", e.what());
  }
  try {
    make_comb(c.spectrum);
  } catch (const ParseError& e) {
    throw ConfigError("spectrum.launch_profile", e.what());
  } catch (const DomainError& e) {
    throw ConfigError("spectrum", e.what());
  }
}

}  // namespace srs::bench
