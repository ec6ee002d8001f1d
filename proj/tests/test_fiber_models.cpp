#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "srs/fiber_models.hpp"

using namespace srs;

namespace {

const std::string kTable = std::string(SRS_DATA_DIR) + "/raman_ssmf_g0.txt";

LossModelParams only(double a, double b) {
  LossModelParams p;
  p.rayleigh_a = a;
  p.rayleigh_b = b;
  return p;
}

}  // namespace

TEST(LossCoefficient, WalkerFitAt1550) {
  // mpmath evaluation in tests/oracles/compute_oracles.py
  EXPECT_NEAR(loss_coefficient(LossModelParams::ssmf(), 1.55), 0.19417650507945077, 1e-14);
}

TEST(LossCoefficient, ConstantTermOnly) {
  const auto p = only(0.0, 0.2);
  for (double lam : {1.2, 1.3, 1.55, 1.7}) EXPECT_DOUBLE_EQ(loss_coefficient(p, lam), 0.2);
}

TEST(LossCoefficient, RayleighAtOneMicron) {
  // 1.0 um is outside the supported window, so check lambda^-4 scaling inside it instead
  const auto p = only(0.9192, 0.0);
  EXPECT_DOUBLE_EQ(loss_coefficient(p, 1.2) * std::pow(1.2, 4), 0.9192);
  EXPECT_THROW(loss_coefficient(p, 1.0), DomainError);
}

TEST(LossCoefficient, OutOfRange) {
  EXPECT_THROW(loss_coefficient(LossModelParams::ssmf(), 1.19), DomainError);
  EXPECT_THROW(loss_coefficient(LossModelParams::ssmf(), 1.71), DomainError);
  EXPECT_THROW(loss_coefficient(LossModelParams::ssmf(), std::nan("")), DomainError);
}

TEST(LossCoefficient, PositiveAndContinuous) {
  const auto p = LossModelParams::ssmf();
  double prev = loss_coefficient(p, 1.26);
  for (double lam = 1.26 + 1e-4; lam <= 1.68; lam += 1e-4) {
    const double a = loss_coefficient(p, lam);
    EXPECT_GT(a, 0.0);
    EXPECT_LT(std::abs(a - prev), 1e-3) << lam;
    prev = a;
  }
}

TEST(LossModel, RejectsInvalid) {
  auto p = LossModelParams::ssmf();
  p.rayleigh_a = -1.0;
  EXPECT_THROW(p.validate(), DomainError);
  p = LossModelParams::ssmf();
  p.peaks.front().width_um = 0.0;
  EXPECT_THROW(LossProfile::parametric(p), DomainError);
}

TEST(LossProfile, FlatConversionIsBitStable) {
  const auto flat = LossProfile::flat(0.2);
  const double expected = 0.2 / (10.0 * std::log10(std::numbers::e)) / 1000.0;
  for (double f : {180e12, 193.1e12, 221e12}) EXPECT_EQ(flat.alpha(f), expected);
  EXPECT_NEAR(expected, 4.605170185988091e-05, 1e-18);
}

TEST(EffectiveArea, SsmfAt1550) {
  const auto g = FiberGeometry::ssmf();
  EXPECT_NEAR(effective_area(g, frequency_hz_from_um(1.55)) * 1e12, 82.988941133581051, 1e-9);
}

TEST(EffectiveArea, DecreasesWithFrequency) {
  const auto g = FiberGeometry::ssmf();
  EXPECT_GT(effective_area(g, 180e12), effective_area(g, 220e12));
}

TEST(EffectiveArea, ModeRadiusEqualsCoreWhenLnVIsOne) {
  auto g = FiberGeometry::ssmf();
  // choose the frequency where V = e
  const double f = std::numbers::e / normalized_frequency(g, 1.0);
  EXPECT_NEAR(effective_area(g, f), std::numbers::pi * g.core_radius_m * g.core_radius_m, 1e-24);
}

TEST(EffectiveArea, RejectsCutoff) {
  const auto g = FiberGeometry::ssmf();
  const double f_v1 = 1.0 / normalized_frequency(g, 1.0);
  EXPECT_THROW(effective_area(g, 0.999 * f_v1), DomainError);
}

TEST(FiberGeometry, Invariants) {
  const auto g = FiberGeometry::ssmf();
  EXPECT_NEAR(g.relative_index_step, (g.core_index - g.cladding_index) / g.core_index, 1e-12);
  auto bad = g;
  bad.core_index = 1.40;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = g;
  bad.relative_index_step = 0.004;
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(RamanTable, MinimalFile) {
  std::istringstream in("# comment\n-1 -1e-5\n0 0\n\n1 1e-5  # trailing\n");
  const auto t = parse_raman_table(in, "mem");
  EXPECT_EQ(t.size(), 3u);
  EXPECT_DOUBLE_EQ(t.g0_at(0.5e12), 0.5e-5);
  EXPECT_DOUBLE_EQ(t.g0_at(-0.25e12), -0.25e-5);
  EXPECT_EQ(t.g0_at(1.5e12), 0.0);
}

TEST(RamanTable, DescendingGridNamesLine) {
  std::istringstream in("-1 -1e-5\n0 0\n2 1e-5\n1 1e-5\n");
  try {
    parse_raman_table(in, "mem");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(RamanTable, MalformedRows) {
  std::istringstream a("0 0\n1 abc\n");
  EXPECT_THROW(parse_raman_table(a, "mem"), ParseError);
  std::istringstream b("0 0 7\n1 1\n");
  EXPECT_THROW(parse_raman_table(b, "mem"), ParseError);
  std::istringstream c("1 1e-5\n2 2e-5\n");  // no zero neighbourhood
  EXPECT_THROW(parse_raman_table(c, "mem"), ParseError);
  std::istringstream d("-1 -1e-5\n0 1e-6\n1 1e-5\n");  // nonzero at zero shift
  EXPECT_THROW(parse_raman_table(d, "mem"), ParseError);
  EXPECT_THROW(load_raman_table("/nonexistent/table.txt"), ParseError);
}

TEST(RamanTable, BundledDatasetPeak) {
  const auto t = load_raman_table(kTable);
  const double peak = t.peak_shift_hz();
  EXPECT_GE(peak, 12e12);
  EXPECT_LE(peak, 14e12);
  EXPECT_EQ(t.g0_at(0.0), 0.0);
  for (double s = 0.1e12; s < 40e12; s += 0.37e12) {
    EXPECT_GT(t.g0_at(s), 0.0);
    EXPECT_LT(t.g0_at(-s), 0.0);
  }
}

TEST(RamanTable, Symmetrized) {
  std::istringstream in("-2 -5e-5\n-1 -3e-5\n0 0\n1 1e-5\n3 2e-5\n");
  const auto t = parse_raman_table(in, "mem").symmetrized();
  t.validate();
  for (double s : {0.3e12, 1.0e12, 2.2e12, 3.0e12}) EXPECT_EQ(t.g0_at(-s), -t.g0_at(s));
}

TEST(RamanGain, ZeroAtEqualFrequencies) {
  const RamanGainModel m(load_raman_table(kTable), FiberGeometry::ssmf());
  EXPECT_EQ(raman_gain(m, 193e12, 193e12), 0.0);
}

TEST(RamanGain, UnitScalingAtReferencePump) {
  const auto table = load_raman_table(kTable);
  const RamanGainModel m(table, FiberGeometry::ssmf());
  const double f_ref = table.reference_frequency_hz;
  EXPECT_DOUBLE_EQ(raman_gain(m, f_ref - 13e12, f_ref), table.g0_at(13e12));
}

TEST(RamanGain, ScaledAwayFromReference) {
  const RamanGainModel m(load_raman_table(kTable), FiberGeometry::ssmf());
  // mpmath composition of the effective-area model, tests/oracles/compute_oracles.py
  EXPECT_NEAR(raman_gain(m, 183.1e12, 196.1e12), 0.00036695977141861656, 1e-15);
}

TEST(RamanGain, SignConvention) {
  const RamanGainModel m(load_raman_table(kTable), FiberGeometry::ssmf());
  EXPECT_GT(raman_gain(m, 190e12, 200e12), 0.0);
  EXPECT_LT(raman_gain(m, 200e12, 190e12), 0.0);
  EXPECT_EQ(raman_gain(m, 180e12, 230e12), 0.0);  // beyond the table
}

TEST(RamanGain, AntisymmetricInSymmetricMode) {
  std::istringstream in("-20 -1e-4\n-3 -2e-4\n0 0\n5 1e-4\n13 4e-4\n25 2e-5\n");
  const RamanGainModel m(parse_raman_table(in, "asym"), FiberGeometry::ssmf(), /*symmetric_gain=*/true);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> f(180e12, 221e12);
  for (int i = 0; i < 500; ++i) {
    const double a = f(rng), b = f(rng);
    EXPECT_EQ(raman_gain(m, a, b), -raman_gain(m, b, a));
  }
}

TEST(RamanGain, PolarizationFactorScales) {
  auto table = load_raman_table(kTable);
  const RamanGainModel unit(table, FiberGeometry::ssmf());
  table.polarization_factor = 0.5;
  const RamanGainModel half(table, FiberGeometry::ssmf());
  EXPECT_DOUBLE_EQ(raman_gain(half, 190e12, 200e12), 0.5 * raman_gain(unit, 190e12, 200e12));
}

TEST(Coupling, TriangularAndNone) {
  EXPECT_DOUBLE_EQ(coupling_gain(TriangularGain{2e-17}, 190e12, 200e12), 2e-17 * 10e12);
  EXPECT_EQ(coupling_gain(NoRamanGain{}, 190e12, 200e12), 0.0);
}
