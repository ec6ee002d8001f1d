#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "srs/spectrum.hpp"

using namespace srs;

namespace {

std::vector<Band> bands(const std::string& names) {
  std::vector<Band> out;
  for (char c : names) out.push_back(*standard_band(std::string(1, c)));
  return out;
}

WdmComb u_to_e(double dbm = -1.0) { return build_comb(bands("ULCSE"), 75e9, {dbm}); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("srs_test_" + name)).string();
}

}  // namespace

TEST(BuildComb, CBandCount) { EXPECT_EQ(build_comb(bands("C"), 75e9, {}).size(), 65u); }

TEST(BuildComb, FullCountAndBookkeeping) {
  const auto comb = build_comb(bands("ULCSE"), 75e9, {-4.0});
  EXPECT_EQ(comb.size(), 517u);
  EXPECT_NEAR(watt_to_dbm(comb.total_power_w()), 23.1, 0.05);
  EXPECT_NEAR(watt_to_dbm(flat_launch(comb, 2.0).total_power_w()), 29.1, 0.05);
  EXPECT_NEAR(watt_to_dbm(flat_launch(comb, -1.0).total_power_w()), -1.0 + 10.0 * std::log10(517.0), 1e-12);
}

TEST(BuildComb, DegenerateBand) {
  const auto comb = build_comb({{"X", 193e12, 193e12}}, 75e9, {});
  ASSERT_EQ(comb.size(), 1u);
  EXPECT_EQ(comb[0].frequency_hz, 193e12);
}

TEST(BuildComb, OffGridAndOverlap) {
  EXPECT_THROW(build_comb({{"X", 193e12, 193.1e12}}, 75e9, {}), DomainError);
  EXPECT_THROW(build_comb({{"A", 193e12, 193.3e12}, {"B", 193.3e12, 193.6e12}}, 75e9, {}), DomainError);
  EXPECT_THROW(build_comb(bands("C"), 0.0, {}), DomainError);
}

TEST(BuildComb, OrderIndependentAndGuardBands) {
  const auto a = build_comb(bands("ULCSE"), 75e9, {});
  const auto b = build_comb(bands("ESCLU"), 75e9, {});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].frequency_hz, b[i].frequency_hz);
    EXPECT_EQ(a[i].band, b[i].band);
    EXPECT_EQ(a[i].index, i);
  }
  for (const auto& c : a.channels()) {
    const bool in_gap = c.frequency_hz > 190.810e12 + 1 && c.frequency_hz < 191.310e12 - 1;
    EXPECT_FALSE(in_gap);
  }
}

TEST(FlatLaunch, SingleChannelZeroDbm) {
  const auto comb = flat_launch(build_comb({{"X", 193e12, 193e12}}, 75e9, {}), 0.0);
  EXPECT_DOUBLE_EQ(comb.total_power_w(), 1e-3);
}

TEST(FirstBandwidth, StartsAtUBand) {
  const auto full = u_to_e();
  const auto sub = full.first_bandwidth(2.5e12);
  EXPECT_EQ(sub.size(), 34u);  // 2.5 THz / 75 GHz rounded up
  EXPECT_EQ(sub[0].frequency_hz, full[0].frequency_hz);
  EXPECT_EQ(full.first_bandwidth(100e12).size(), full.size());
}

TEST(LaunchProfile, RoundTripIsBitExact) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> p(-6.0, 3.0);
  auto comb = u_to_e();
  std::vector<double> powers;
  for (std::size_t i = 0; i < comb.size(); ++i) powers.push_back(dbm_to_watt(p(rng)) * (1.0 + 1e-13 * i));
  comb = comb.with_powers(powers);
  const auto path = temp_path("roundtrip.csv");
  write_launch_profile(comb, path);
  const auto back = load_launch_profile(u_to_e(), path);
  for (std::size_t i = 0; i < comb.size(); ++i) EXPECT_EQ(back[i].power_w, comb[i].power_w) << i;
  std::filesystem::remove(path);
}

TEST(LaunchProfile, FlatEchoMatchesFlatLaunch) {
  std::ostringstream csv;
  csv << "frequency_THz,power_dBm\n";
  const auto comb = u_to_e(3.0);
  for (const auto& c : comb.channels()) csv << to_thz(c.frequency_hz) << ",-1\n";
  std::istringstream in(csv.str());
  const auto loaded = parse_launch_profile(comb, in, "mem");
  const auto flat = flat_launch(comb, -1.0);
  for (std::size_t i = 0; i < comb.size(); ++i) EXPECT_EQ(loaded[i].power_w, flat[i].power_w);
}

TEST(LaunchProfile, MissingChannelIsNamed) {
  const auto comb = build_comb(bands("C"), 75e9, {});
  std::ostringstream csv;
  csv << "frequency_THz,power_dBm\n";
  for (std::size_t i = 0; i < comb.size(); ++i) {
    if (i != 10) csv << to_thz(comb[i].frequency_hz) << ",0\n";
  }
  std::istringstream in(csv.str());
  try {
    parse_launch_profile(comb, in, "mem");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("192.060"), std::string::npos) << e.what();
  }
}

TEST(LaunchProfile, DuplicateAndStrayRows) {
  const auto comb = build_comb({{"X", 193e12, 193.075e12}}, 75e9, {});
  std::istringstream dup("frequency_THz,power_dBm\n193,0\n193,1\n193.075,0\n");
  EXPECT_THROW(parse_launch_profile(comb, dup, "mem"), ParseError);
  std::istringstream stray("frequency_THz,power_dBm\n193,0\n193.075,0\n200,0\n");
  EXPECT_THROW(parse_launch_profile(comb, stray, "mem"), ParseError);
}

TEST(WdmComb, Invariants) {
  std::vector<Channel> close = {{0, 193e12, 64e9, 1e-3, "X"}, {1, 193.05e12, 64e9, 1e-3, "X"}};
  EXPECT_THROW(WdmComb(close, 75e9), DomainError);
  std::vector<Channel> negative = {{0, 193e12, 64e9, -1e-3, "X"}};
  EXPECT_THROW(WdmComb(negative, 75e9), DomainError);
}
