#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "srs/accuracy.hpp"
#include "srs/numerical.hpp"
#include "srs/perturbative.hpp"
#include "test_helpers.hpp"

using namespace srs;
using namespace srs::testing;

namespace {

const double kAlpha02 = db_per_km_to_per_m(0.2);

SpanProblem realistic(std::size_t n, double dbm, double length = 70e3) {
  const auto comb = small_comb(n, 186e12, 0.75e12, dbm);
  return SpanProblem::prepare(comb, {length, LossProfile::parametric(LossModelParams::ssmf()), ssmf_gain()});
}

double max_abs_diff_db(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) * kNeperToDb);
  return m;
}

}  // namespace

TEST(EffectiveLength, Limits) {
  EXPECT_EQ(effective_length(0.0, 70e3), 70e3);
  EXPECT_NEAR(effective_length(kAlpha02, 70e3), (1 - std::exp(-kAlpha02 * 70e3)) / kAlpha02, 1e-9);
  EXPECT_NEAR(effective_length(1e-12, 1e3), 1e3 * (1 - 0.5e-9), 1e-12);
  EXPECT_THROW(effective_length(-1.0, 1.0), DomainError);
}

TEST(LossWeightedLength, MatchesQuadratureAndIsContinuous) {
  // int_0^z e^{-a u} Lambda(u, b) du by composite Simpson
  auto simpson = [](double a, double b, double z) {
    const int n = 20000;
    const double h = z / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double u = i * h;
      const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
      s += w * std::exp(-a * u) * effective_length(b, u);
    }
    return s * h / 3;
  };
  for (double a : {0.0, kAlpha02, 2 * kAlpha02}) {
    for (double b : {1e-14, 1e-11, kAlpha02, 3 * kAlpha02}) {
      EXPECT_NEAR(loss_weighted_length(a, b, 5e4) / simpson(a, b, 5e4), 1.0, 1e-10) << a << " " << b;
    }
  }
  // branch switch at a_inner z = 1e-6
  const double z = 1e4, b = 1e-10;
  EXPECT_NEAR(loss_weighted_length(kAlpha02, b * 0.999999, z) / loss_weighted_length(kAlpha02, b * 1.000001, z), 1.0,
              1e-9);
}

TEST(Partitions, CountsAndWeights) {
  EXPECT_EQ(partition_terms(0).size(), 1u);
  EXPECT_EQ(partition_terms(3).size(), 3u);  // sources of order 4
  EXPECT_EQ(partition_terms(4).size(), 5u);
  EXPECT_EQ(partition_terms(10).size(), 42u);
  std::set<double> weights;
  for (const auto& t : partition_terms(3)) {
    int sum = 0;
    for (auto [j, n] : t.factors) sum += j * n;
    EXPECT_EQ(sum, 3);
    weights.insert(t.weight);
  }
  EXPECT_EQ(weights, (std::set<double>{1.0, 1.0 / 6.0}));
  EXPECT_THROW(partition_terms(-1), DomainError);
}

TEST(QuadratureGrid, EvenIntervals) {
  const auto g = quadrature_grid(70e3, 1000.0);
  EXPECT_EQ(g.size(), 71u);
  EXPECT_EQ(g.back(), 70e3);
  EXPECT_EQ(quadrature_grid(71e3, 1000.0).size(), 73u);
  EXPECT_EQ(quadrature_grid(500.0, 1000.0).size(), 2u);
  EXPECT_EQ(quadrature_grid(0.0, 1000.0).size(), 1u);
  EXPECT_THROW(quadrature_grid(1.0, 0.0), DomainError);
}

TEST(GammaFirstOrder, MatchesDirectSum) {
  const auto p = realistic(12, 2.0);
  const auto o = gamma_first_order(p, PerturbativeSettings{});
  const std::size_t zi = 37;
  const double z = o.z_m[zi];
  for (std::size_t ch = 0; ch < p.size(); ++ch) {
    double expected = 0.0;
    for (std::size_t q = 0; q < p.size(); ++q) {
      expected += p.gain(ch, q) * p.launch_w[q] * (1 - std::exp(-p.alpha[q] * z)) / p.alpha[q];
    }
    EXPECT_NEAR(o.value(1, ch, zi), expected, 1e-12 * std::abs(expected) + 1e-18);
  }
}

TEST(GammaFirstOrder, SingleChannelIsZero) {
  const auto p = realistic(1, 5.0);
  const auto o = compute_orders(p, 3);
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(o.max_abs(k), 0.0);
  const auto sol = truncated_power_profile(o, p, 3);
  EXPECT_NEAR(sol.final_profile()[0], p.launch_w[0] * std::exp(-p.alpha[0] * 70e3), 1e-18);
}

TEST(GammaSecondOrder, PairOracle) {
  const auto p = pair_problem(4e-4, -3e-4, 1e-3, 2e-3, kAlpha02, 2 * kAlpha02, 5e4);
  // mpmath quadrature, tests/oracles/compute_oracles.py
  const double oracle = -1.8333056949528874e-5;
  EXPECT_NEAR(gamma_second_order_analytic(p, 5e4)[0], oracle, 1e-17);
  for (auto rule : {QuadratureRule::Trapezoid, QuadratureRule::LossWeighted}) {
    const auto o = compute_orders(p, 2, {10.0, rule});
    EXPECT_NEAR(o.value(2, 0, o.points() - 1), oracle, 1e-6 * std::abs(oracle)) << to_string(rule);
  }
}

TEST(GammaSecondOrder, AnalyticMatchesQuadratureOnComb) {
  const auto p = realistic(40, 3.0);
  const auto o = compute_orders(p, 2, {100.0});
  const auto exact = gamma_second_order_analytic(p, p.length_m);
  EXPECT_LT(max_abs_diff_db(exact, o.at(2, o.points() - 1)), 1e-4);
}

TEST(Quadrature, SecondOrderConvergence) {
  const auto p = realistic(24, 4.0);
  const auto exact = gamma_second_order_analytic(p, p.length_m);
  for (auto rule : {QuadratureRule::Trapezoid, QuadratureRule::LossWeighted}) {
    auto err = [&](double h) {
      const auto o = compute_orders(p, 2, {h, rule});
      return max_abs_diff_db(exact, o.at(2, o.points() - 1));
    };
    EXPECT_NEAR(err(2000.0) / err(1000.0), 4.0, 0.3) << to_string(rule);
  }
}

TEST(Quadrature, RichardsonEstimateTracksError) {
  const auto p = realistic(24, 4.0);
  const auto exact = gamma_second_order_analytic(p, p.length_m);
  const auto o = compute_orders(p, 2, {1000.0});
  const double actual = max_abs_diff_db(exact, o.at(2, o.points() - 1));
  const double estimate = o.quadrature_error[1] * kNeperToDb;
  EXPECT_GT(estimate, 0.5 * actual);
  EXPECT_LT(estimate, 2.0 * actual);
}

TEST(Quadrature, ToleranceAbort) {
  const auto p = realistic(24, 6.0);
  try {
    compute_orders(p, 3, {5000.0, QuadratureRule::Trapezoid, 1e-9});
    FAIL();
  } catch (const QuadratureError& e) {
    EXPECT_EQ(e.order(), 2);
    EXPECT_GT(e.estimate_db(), 1e-9);
  }
}

TEST(Orders, PowerScaling) {
  const auto p = realistic(20, 0.0);
  std::vector<double> scaled = p.launch_w;
  const double s = 1.7;
  for (double& w : scaled) w *= s;
  const auto a = compute_orders(p, 4);
  const auto b = compute_orders(p.with_launch(scaled), 4);
  for (int k = 1; k <= 4; ++k) {
    const double factor = std::pow(s, k);
    for (std::size_t zi = 1; zi < a.points(); zi += 7) {
      for (std::size_t ch = 0; ch < p.size(); ++ch) {
        const double ref = a.value(k, ch, zi) * factor;
        EXPECT_NEAR(b.value(k, ch, zi), ref, 1e-9 * std::abs(ref) + 1e-300) << k;
      }
    }
  }
}

TEST(Orders, ConvergeToFlatTriangularClosedForm) {
  // Tilted launch: with a symmetric comb the odd cumulants vanish and Gamma^(3) is zero.
  auto comb = small_comb(65, 191.4e12, 75e9, 0.0);
  std::vector<double> tilt;
  for (std::size_t i = 0; i < comb.size(); ++i) tilt.push_back(dbm_to_watt(-2.0 + 4.0 * i / 64.0));
  comb = comb.with_powers(tilt);
  const double slope = 3e-17;
  const FiberSpan span{70e3, LossProfile::flat(0.2), TriangularGain{slope}};
  const auto p = SpanProblem::prepare(comb, span);
  const auto o = compute_orders(p, 4, {100.0});
  const auto exact = closed_form_flat_triangular(p.frequency_hz, p.launch_w, p.alpha[0], slope, p.length_m);
  double prev = INFINITY;
  for (int k = 0; k <= 4; ++k) {
    const auto r = relative_error(exact, truncated_power_profile(o, p, k).final_profile());
    EXPECT_LT(r.max_abs_db, prev) << k;
    prev = r.max_abs_db;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Orders, MatchesNumericalAtLowPower) {
  const auto p = realistic(30, -3.0);
  const auto ref = integrate(p, {10.0});
  const auto o = compute_orders(p, 4, {250.0});
  const auto sol = truncated_power_profile(o, p, 4);
  EXPECT_LT(relative_error(ref, sol, p.length_m).max_abs_db, 1e-4);
}

TEST(Truncated, OrderZeroIsLossOnly) {
  const auto p = realistic(8, 2.0);
  const auto o = compute_orders(p, 1);
  const auto sol = truncated_power_profile(o, p, 0);
  for (std::size_t ch = 0; ch < p.size(); ++ch) {
    EXPECT_NEAR(sol.final_profile()[ch] / (p.launch_w[ch] * std::exp(-p.alpha[ch] * p.length_m)), 1.0, 1e-14);
  }
  EXPECT_THROW(truncated_power_profile(o, p, 2), DomainError);
  EXPECT_THROW(compute_orders(p, 0), DomainError);
}

TEST(Orders, Deterministic) {
  const auto p = realistic(33, 1.0);
  const auto a = compute_orders(p, 5);
  const auto b = compute_orders(p, 5);
  EXPECT_EQ(a.gamma, b.gamma);
}

TEST(QuadratureRule, Names) {
  EXPECT_EQ(quadrature_rule_from_string("loss-weighted"), QuadratureRule::LossWeighted);
  EXPECT_STREQ(to_string(QuadratureRule::Trapezoid), "trapezoid");
  EXPECT_THROW(quadrature_rule_from_string("simpson"), DomainError);
}
