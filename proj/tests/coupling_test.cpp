#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/binomial.hpp>
#include <gmpxx.h>
#include <gtest/gtest.h>

#include "permwalk/coupling.hpp"

namespace permwalk {
namespace {

using R = Rational;

std::vector<R> binomial_oracle(std::int64_t n, const R& p) {
  std::vector<R> out;
  for (std::int64_t k = 0; k <= n; ++k) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    mpq_class pk, qk;
    mpz_class a, b;
    mpz_pow_ui(a.get_mpz_t(), p.get_num_mpz_t(), static_cast<unsigned long>(k));
    mpz_pow_ui(b.get_mpz_t(), mpz_class(p.get_den() - p.get_num()).get_mpz_t(), static_cast<unsigned long>(n - k));
    mpz_class den;
    mpz_pow_ui(den.get_mpz_t(), p.get_den_mpz_t(), static_cast<unsigned long>(n));
    R v(c * a * b, den);
    v.canonicalize();
    out.push_back(v);
  }
  return out;
}

TEST(CouplingTest, LargeNIntervals) {
  EXPECT_EQ(default_shift(10000), 1);
  const auto [I, J] = coupling_intervals(10000, R(1, 2), 1);
  EXPECT_EQ(I, (IntInterval{4900, 5000}));
  EXPECT_EQ(J, (IntInterval{4900, 4999}));
}

TEST(CouplingTest, DefaultShift) {
  EXPECT_EQ(default_shift(1), 1);
  EXPECT_EQ(default_shift(2), 2); // sqrt 2 / ln^2 2 = 2.94
  EXPECT_EQ(default_shift(100), 1);
  // sqrt(n) / ln^2 n first reaches 2 near n = 10^5
  EXPECT_EQ(default_shift(200000), 3);
  EXPECT_THROW(default_shift(0), std::invalid_argument);
}

TEST(CouplingTest, IntervalsAgainstFloatingFormula) {
  for (std::int64_t n : {3, 10, 17, 64, 99, 200, 1000}) {
    for (const R& p : {R(1, 2), R(2, 3), R(1, 3)}) {
      const auto m = default_shift(n);
      const auto [I, J] = coupling_intervals(n, p, m);
      const double pn = p.get_d() * static_cast<double>(n), r = std::sqrt(static_cast<double>(n));
      EXPECT_EQ(I.lo, std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(pn - r)))) << n;
      EXPECT_EQ(I.hi, static_cast<std::int64_t>(std::floor(pn))) << n;
      EXPECT_EQ(J.lo, I.lo);
      EXPECT_EQ(J.hi, static_cast<std::int64_t>(std::floor(pn)) - m) << n;
    }
  }
}

TEST(CouplingTest, ExactMarginalsAndStructure) {
  for (const R& p : {R(1, 2), R(2, 3)}) {
    for (std::int64_t n = 1; n <= 200; n += (n < 20 ? 1 : 13)) {
      const BinomialCoupling<R> c(n, p);
      const auto oracle = binomial_oracle(n, p);
      EXPECT_EQ(c.marginal_first(), oracle) << "n=" << n;
      EXPECT_EQ(c.marginal_second(), oracle) << "n=" << n;
      R total = 0;
      for (const auto& e : c.entries()) {
        total += e.weight;
        EXPECT_GT(e.weight, 0);
        if (c.J().contains(e.first)) EXPECT_EQ(e.second, e.first + c.m());
        else if (!c.I().contains(e.first)) EXPECT_EQ(e.second, e.first);
        else EXPECT_TRUE(c.I().contains(e.second));
      }
      EXPECT_EQ(total, 1);
      // B' < B only on the I \ J block.
      R below_bound = 0;
      for (std::int64_t i = c.I().lo; i <= c.I().hi; ++i)
        if (!c.J().contains(i)) below_bound += c.pmf()[static_cast<std::size_t>(i)];
      EXPECT_LE(c.prob_second_below_first(), below_bound);
      EXPECT_GE(c.prob_gap_at_least_m(), c.prob_first_in_J());
    }
  }
}

TEST(CouplingTest, MassInJAgainstBinomialCdf) {
  for (const R& p : {R(1, 2), R(2, 3)}) {
    for (std::int64_t n : {10, 50, 100, 200}) {
      const BinomialCoupling<R> c(n, p);
      if (c.J().empty()) continue;
      boost::math::binomial_distribution<double> law(static_cast<double>(n), p.get_d());
      const double lower = c.J().lo > 0 ? boost::math::cdf(law, static_cast<double>(c.J().lo - 1)) : 0.0;
      const double oracle = boost::math::cdf(law, static_cast<double>(c.J().hi)) - lower;
      EXPECT_NEAR(c.prob_first_in_J().get_d(), oracle, 1e-12) << n;
    }
  }
}

TEST(CouplingTest, FloatModeTracksRationalMode) {
  for (std::int64_t n : {7, 64, 150}) {
    const BinomialCoupling<R> exact(n, R(2, 3));
    const BinomialCoupling<double> approx(n, R(2, 3));
    const auto e = exact.entries();
    const auto a = approx.entries();
    ASSERT_EQ(e.size(), a.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
      EXPECT_EQ(e[k].first, a[k].first);
      EXPECT_EQ(e[k].second, a[k].second);
      EXPECT_NEAR(e[k].weight.get_d(), a[k].weight, 1e-12);
    }
  }
}

TEST(CouplingTest, EmptyJWhenShiftCoversI) {
  const BinomialCoupling<R> c(2, R(1, 2));
  EXPECT_EQ(c.m(), 2);
  EXPECT_TRUE(c.J().empty());
  EXPECT_EQ(c.prob_second_below_first(), 0);
  EXPECT_EQ(c.marginal_second(), binomial_oracle(2, R(1, 2)));
}

TEST(CouplingTest, SampleSecondFollowsConditionalLaw) {
  const BinomialCoupling<double> c(64, R(1, 2));
  Engine rng = make_engine(5);
  const std::int64_t top = c.I().hi; // the only point of I \ J
  std::map<std::int64_t, int> seen;
  const int n = 40000;
  for (int k = 0; k < n; ++k) ++seen[c.sample_second(top, rng)];
  for (const auto& e : c.block()) {
    ASSERT_EQ(e.first, top);
    const double expected = e.weight / c.pmf()[static_cast<std::size_t>(top)];
    EXPECT_NEAR(seen[e.second] / static_cast<double>(n), expected, 0.015);
  }
  EXPECT_EQ(c.sample_second(c.J().lo, rng), c.J().lo + 1);
  EXPECT_EQ(c.sample_second(0, rng), 0);
}

TEST(CouplingTest, BridgeExhaustiveLengthFour) {
  // Every base path ending at 0 and every flip of one -1 step.
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::vector<int> s(4);
    int end = 0;
    for (int i = 0; i < 4; ++i) end += s[static_cast<std::size_t>(i)] = (mask >> i & 1) ? 1 : -1;
    if (end != 0) continue;
    for (int flip = 0; flip < 4; ++flip) {
      if (s[static_cast<std::size_t>(flip)] > 0) continue;
      auto sp = s;
      sp[static_cast<std::size_t>(flip)] = 1;
      int a = 0, b = 0, prev = 0;
      for (int i = 0; i < 4; ++i) {
        a += s[static_cast<std::size_t>(i)];
        b += sp[static_cast<std::size_t>(i)];
        EXPECT_TRUE(b - a == 0 || b - a == 2);
        EXPECT_GE(b - a, prev);
        prev = b - a;
      }
      EXPECT_EQ(b, 2);
    }
  }
  // The sampler itself.
  Engine rng = make_engine(7);
  for (int k = 0; k < 500; ++k) {
    const auto pair = bridge_coupling(0, 2, 4, rng);
    int a = 0, b = 0, flips = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      a += pair.first[i];
      b += pair.second[i];
      flips += pair.first[i] != pair.second[i];
      EXPECT_GE(b, a);
    }
    EXPECT_EQ(a, 0);
    EXPECT_EQ(b, 2);
    EXPECT_EQ(flips, 1);
  }
}

TEST(CouplingTest, BridgeEqualEndpointsGiveEqualPaths) {
  Engine rng = make_engine(9);
  const auto pair = bridge_coupling(4, 4, 20, rng);
  EXPECT_EQ(pair.first, pair.second);
}

TEST(CouplingTest, BridgeErrors) {
  Engine rng = make_engine(1);
  EXPECT_THROW(bridge_coupling(2, 0, 4, rng), std::invalid_argument);
  EXPECT_THROW(bridge_coupling(0, 1, 4, rng), std::invalid_argument);
  EXPECT_THROW(bridge_coupling(0, 6, 4, rng), std::invalid_argument);
  EXPECT_THROW(uniform_bridge(1, 4, rng), std::invalid_argument);
}

TEST(CouplingTest, BridgePointwiseOrderAndUniformBase) {
  Engine rng = make_engine(13);
  const int L = 10, n = 30000;
  std::vector<int> first_up(L, 0);
  for (int k = 0; k < n; ++k) {
    const auto pair = bridge_coupling(-2, 4, L, rng);
    int a = 0, b = 0;
    for (int i = 0; i < L; ++i) {
      a += pair.first[static_cast<std::size_t>(i)];
      b += pair.second[static_cast<std::size_t>(i)];
      ASSERT_GE(b, a);
      first_up[static_cast<std::size_t>(i)] += pair.second[static_cast<std::size_t>(i)] > 0;
    }
    ASSERT_EQ(b, 4);
  }
  // S' is a uniform bridge to 4: each step is up with probability 7/10.
  for (int c : first_up) EXPECT_NEAR(c / static_cast<double>(n), 0.7, 0.015);
}

TEST(CouplingTest, DegenerateEpochHasIdenticalIncrements) {
  Engine rng = make_engine(21);
  const auto inc = epoch_increments(R(2, 3), 1 << 12, rng);
  std::size_t start = 2;
  std::int64_t len = 2;
  int degenerate = 0;
  for (auto gain : inc.epoch_gain) {
    const auto stop = std::min<std::size_t>(start + static_cast<std::size_t>(len), inc.first.size());
    if (gain == 0) {
      ++degenerate;
      for (std::size_t i = start; i < stop; ++i) EXPECT_EQ(inc.first[i], inc.second[i]);
    }
    if (gain >= 0) {
      std::int64_t a = 0, b = 0;
      for (std::size_t i = start; i < stop; ++i) {
        a += inc.first[i];
        b += inc.second[i];
        EXPECT_GE(b, a);
      }
    }
    start = stop;
    len *= 2;
  }
  EXPECT_GT(degenerate, 0);
}

TEST(CouplingTest, EpochCouplingMarginalsAreBiasedWalks) {
  // X'_T over many runs: mean (2p - 1) T, variance 4 p (1 - p) T.
  const std::int64_t T = 1024;
  const auto runs = run_replicates(4000, 8, [&](std::size_t r) {
    const auto c = epoch_coupling(R(2, 3), T, 3, r);
    return std::pair{c.x.back(), c.xp.back()};
  });
  for (int side = 0; side < 2; ++side) {
    double mean = 0, var = 0;
    for (const auto& [a, b] : runs) mean += static_cast<double>(side ? b : a);
    mean /= static_cast<double>(runs.size());
    for (const auto& [a, b] : runs) var += std::pow(static_cast<double>(side ? b : a) - mean, 2);
    var /= static_cast<double>(runs.size() - 1);
    const double m0 = T / 3.0, v0 = 4.0 * 2.0 / 9.0 * T;
    EXPECT_NEAR(mean, m0, 4.5 * std::sqrt(v0 / static_cast<double>(runs.size())));
    EXPECT_NEAR(var / v0, 1.0, 0.1);
  }
}

TEST(CouplingTest, EpochGapEventuallyNonnegative) {
  // t0 is taken as the start of the last epoch, T/2.
  const std::int64_t T = 1 << 16;
  const auto ok = run_replicates(100, 8, [&](std::size_t r) {
    const auto c = epoch_coupling(R(2, 3), T, 2024, r);
    for (std::int64_t t = T / 2; t <= T; ++t)
      if (c.report.gap[static_cast<std::size_t>(t)] < 0) return false;
    return true;
  });
  EXPECT_GE(std::count(ok.begin(), ok.end(), true), 95);
}

TEST(CouplingTest, EpochGapGrowsLikeRootT) {
  std::vector<double> medians;
  for (std::int64_t T : {1 << 14, 1 << 15, 1 << 16}) {
    auto ratios = run_replicates(200, 8, [&](std::size_t r) {
      const auto c = epoch_coupling(R(2, 3), T, 77, r);
      return static_cast<double>(c.report.gap.back()) / std::sqrt(static_cast<double>(T));
    });
    std::sort(ratios.begin(), ratios.end());
    medians.push_back(0.5 * (ratios[99] + ratios[100]));
  }
  for (double m : medians) EXPECT_GT(m, 0.0);
  const auto [lo, hi] = std::minmax_element(medians.begin(), medians.end());
  EXPECT_LT(*hi / *lo, 3.0);
}

TEST(CouplingTest, SlowdownStartsAtZeroAndKeepsSpeeds) {
  Schedule identity;
  identity.d = 3;
  const std::int64_t T = 1 << 14;
  const auto runs = run_replicates(40, 8, [&](std::size_t r) { return slowdown_composition(identity, T, 6, r); });
  double sx = 0, sy = 0;
  for (const auto& c : runs) {
    EXPECT_EQ(c.report.gap[0], 0);
    EXPECT_EQ(c.depth_x.size(), static_cast<std::size_t>(T) + 1);
    sx += c.depth_x.back() / static_cast<double>(T);
    sy += c.depth_y.back() / static_cast<double>(T);
  }
  EXPECT_NEAR(sx / 40, 0.25, 0.01);
  EXPECT_NEAR(sy / 40, 0.25, 0.01);
}

TEST(CouplingTest, SlowdownGapAboveThresholdInMajority) {
  Schedule identity;
  identity.d = 3;
  const std::int64_t T = 1 << 14;
  // t0 is taken as T/2.
  const auto settles = run_replicates(100, 8, [&](std::size_t r) { return slowdown_composition(identity, T, 2024, r).report.settle_time(); });
  EXPECT_GT(std::count_if(settles.begin(), settles.end(), [&](std::int64_t t0) { return t0 <= T / 2; }), 50);
}

TEST(CouplingTest, SlowdownWithEdgeShiftsRuns) {
  Schedule s;
  s.d = 3;
  for (int t = 0; t < 50; ++t) s.permutations.emplace_back(EdgeShift{1 + static_cast<std::uint64_t>(t % 3)});
  const auto c = slowdown_composition(s, 2000, 1);
  EXPECT_EQ(c.report.gap.size(), 2001u);
  s.permutations.emplace_back(Transposition{0, 1});
  EXPECT_THROW(slowdown_composition(s, 10, 1), std::invalid_argument);
  Schedule line;
  line.d = 2;
  EXPECT_THROW(slowdown_composition(line, 10, 1), std::invalid_argument);
}

TEST(CouplingTest, ExceptionalExperimentConsistency) {
  const std::int64_t T = 20000;
  const auto e = exceptional_time_experiment(T, 3);
  const auto s = build_exceptional_schedule(T);
  EXPECT_EQ(e.consistency_failures, 0);
  for (std::int64_t t = 1; t <= T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    EXPECT_EQ(e.y[i], e.x[i] - s.ell[i]);
    if (s.ell[i] == 0) {
      EXPECT_EQ(std::llabs(e.x[i]), std::llabs(e.y[i]));
    }
  }
  EXPECT_TRUE(std::is_sorted(e.running_max.begin() + 1, e.running_max.end()));
  EXPECT_EQ(e.max_phi_ratio, e.running_max.back());
}

TEST(CouplingTest, ExceptionalRunningMaxAtScale) {
  const auto hits = run_replicates(10, 8, [](std::size_t r) { return exceptional_time_experiment(1000000, 1, r).max_phi_ratio > 0.5; });
  EXPECT_GE(std::count(hits.begin(), hits.end(), true), 8);
}

} // namespace
} // namespace permwalk
