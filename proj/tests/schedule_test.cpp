#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <gmpxx.h>
#include <gtest/gtest.h>

#include "oracle.hpp"
#include "permwalk/schedule.hpp"

namespace permwalk {
namespace {

TEST(ScheduleTest, ApplyExamples) {
  const TreeParams params(3, 4);
  for (std::uint64_t i = 0; i < params.vertex_count(); ++i)
    EXPECT_EQ(apply(IdentityPerm{}, VertexId{i}, params).index, i);
  EXPECT_EQ(apply(EdgeShift{1}, VertexId{0}, params).index, 1u);
  EXPECT_EQ(apply(EdgeShift{1}, VertexId{1}, params).index, 0u);
  EXPECT_EQ(apply(EdgeShift{3}, VertexId{3}, params).index, 0u);
  EXPECT_EQ(apply(Transposition{0, 4}, VertexId{4}, params).index, 0u);
  EXPECT_EQ(apply(Transposition{0, 4}, VertexId{7}, params).index, 7u);
  EXPECT_EQ(apply(ExplicitPerm{{1, 0, 3, 2}}, VertexId{2}, params).index, 3u);
  EXPECT_EQ(apply(ExplicitPerm{{1, 0, 3, 2}}, VertexId{8}, params).index, 8u);

  auto path = TreePath::from_signed_coordinate(3);
  apply(Translation{-2}, path, 2);
  EXPECT_EQ(path.signed_coordinate(), 1);
  apply(Translation{-4}, path, 2);
  EXPECT_EQ(path.signed_coordinate(), -3);
  const TreeParams line(2, 4);
  // +3 is index 5, +1 is index 1.
  EXPECT_EQ(apply(Translation{-2}, VertexId{5}, line).index, 1u);
}

TEST(ScheduleTest, ApplyRejectsImagesPastTheCap) {
  const TreeParams params(3, 2);
  EXPECT_THROW(apply(EdgeShift{1}, VertexId{9}, params), BoundaryOverflow);
  EXPECT_THROW(apply(Transposition{0, 40}, VertexId{0}, params), BoundaryOverflow);
  EXPECT_THROW(apply(Translation{1}, VertexId{0}, params), std::invalid_argument);
}

TEST(ScheduleTest, ValidateExamples) {
  EXPECT_TRUE(validate(IdentityPerm{}, 3, 3).valid);
  const auto collide = validate(ExplicitPerm{{0, 1, 1, 3}}, 3, 3);
  EXPECT_FALSE(collide.valid);
  ASSERT_FALSE(collide.problems.empty());
  EXPECT_NE(collide.problems.front().find("collide at 1"), std::string::npos);
  EXPECT_FALSE(validate(ExplicitPerm{{0, 1, 2}}, 3, 3).valid);
  EXPECT_FALSE(validate(ExplicitPerm{{0, 1, 2, 4}}, 3, 3).valid);
  EXPECT_TRUE(validate(ExplicitPerm{{3, 2, 1, 0}}, 3, 3).valid);
  EXPECT_TRUE(validate(EdgeShift{1}, 3, 3).valid);
  EXPECT_FALSE(validate(EdgeShift{4}, 3, 3).valid);
  EXPECT_FALSE(validate(EdgeShift{0}, 3, 3).valid);
  EXPECT_TRUE(validate(Translation{5}, 2, 3).valid);
  EXPECT_FALSE(validate(Translation{5}, 3, 3).valid);
}

// Independent edge check on the explicit tree: every edge of B_3 maps to an
// edge of B_4.
TEST(ScheduleTest, EdgeShiftsPreserveEdgesOnExplicitTree) {
  for (int d = 2; d <= 4; ++d) {
    const auto tree = oracle::build_tree(d, 4);
    const TreeParams params(d, 4);
    for (std::uint64_t target = 1; target <= static_cast<std::uint64_t>(d); ++target) {
      for (std::uint64_t v = 1; v < ball_size(d, 3); ++v) {
        const auto pv = static_cast<std::uint64_t>(tree.parent[v]);
        const auto a = apply(EdgeShift{target}, VertexId{v}, params).index;
        const auto b = apply(EdgeShift{target}, VertexId{pv}, params).index;
        EXPECT_TRUE(tree.open_neighbors(a).contains(b)) << "d=" << d << " target=" << target << " v=" << v;
      }
    }
  }
}

TEST(ScheduleTest, EdgeShiftIsAnInvolutiveIsometry) {
  for (int d = 2; d <= 4; ++d) {
    const auto tree = oracle::build_tree(d, 4);
    const auto dist = tree.distances();
    const TreeParams params(d, 4);
    for (std::uint64_t target = 1; target <= static_cast<std::uint64_t>(d); ++target) {
      std::vector<TreePath> images;
      for (std::uint64_t v = 0; v < tree.size(); ++v) {
        auto path = TreePath::from_vertex(VertexId{v}, params);
        apply(EdgeShift{target}, path, d);
        images.push_back(path);
        apply(EdgeShift{target}, path, d);
        EXPECT_EQ(path.to_vertex(params).index, v);
      }
      for (std::uint64_t u = 0; u < tree.size(); ++u)
        for (std::uint64_t w = 0; w < tree.size(); ++w)
          ASSERT_EQ(distance(images[u], images[w]), dist[u][w]);
    }
  }
}

TEST(ScheduleTest, ApplyIsInjectiveOnRandomWindows) {
  std::mt19937_64 rng(41);
  for (int d = 2; d <= 4; ++d) {
    const TreeParams params(d, 6);
    ExplicitPerm perm;
    perm.map.resize(ball_size(d, 3));
    std::iota(perm.map.begin(), perm.map.end(), 0);
    std::shuffle(perm.map.begin(), perm.map.end(), rng);
    const std::vector<PermutationSpec> specs = {IdentityPerm{}, perm, Transposition{2, 11}, EdgeShift{2}};
    for (const auto& spec : specs) {
      std::set<std::uint64_t> images;
      for (std::uint64_t v = 0; v < ball_size(d, 5); ++v) images.insert(apply(spec, VertexId{v}, params).index);
      EXPECT_EQ(images.size(), ball_size(d, 5)) << kind_name(spec);
    }
  }
}

TEST(ScheduleTest, PrefixCompositionMatchesFolding) {
  std::mt19937_64 rng(43);
  const int d = 3;
  const TreeParams params(d, 12);
  Schedule schedule;
  schedule.d = d;
  schedule.depth = 12;
  for (int t = 0; t < 6; ++t) {
    if (t % 2 == 0) schedule.permutations.emplace_back(EdgeShift{1 + rng() % 3});
    else schedule.permutations.emplace_back(Transposition{rng() % 10, rng() % 40});
  }
  for (std::uint64_t v = 0; v < ball_size(d, 4); ++v) {
    auto path = TreePath::from_vertex(VertexId{v}, params);
    apply_prefix(schedule, 6, path);
    VertexId folded{v};
    for (std::size_t t = 1; t <= 6; ++t) folded = apply(schedule.at(t), folded, params);
    EXPECT_EQ(path.to_vertex(params), folded);
  }
  EXPECT_TRUE(std::holds_alternative<IdentityPerm>(schedule.at(7)));
  EXPECT_TRUE(std::holds_alternative<IdentityPerm>(schedule.at(0)));
}

double phi_oracle(double t) {
  const double l = t >= 16 ? std::log(std::log(t)) : 1.0;
  return std::floor(std::sqrt(4.0 / 3.0 * t * l));
}

TEST(ScheduleTest, PhiValues) {
  EXPECT_EQ(phi(1), 1);
  EXPECT_EQ(phi(100), 14);
  // sqrt((4/3) 10^6 ln ln 10^6) = 1871.1
  EXPECT_EQ(phi(1000000), 1871);
  for (std::int64_t t : {2, 15, 16, 17, 1000, 123456, 9999999})
    EXPECT_EQ(static_cast<double>(phi(t)), phi_oracle(static_cast<double>(t))) << t;
  EXPECT_THROW(phi(0), std::domain_error);
}

TEST(ScheduleTest, ExceptionalScheduleExamples) {
  const auto s = build_exceptional_schedule(20);
  ASSERT_GE(s.b.size(), 5u);
  EXPECT_EQ(std::vector<std::int64_t>(s.b.begin(), s.b.begin() + 5), (std::vector<std::int64_t>{1, 3, 6, 9, 13}));
  EXPECT_EQ(s.ell[1], -2);
  EXPECT_EQ(s.ell[2], 0);
  EXPECT_EQ(s.translation_at(1).offset, 2);
  EXPECT_EQ(s.translation_at(2).offset, -2);
  EXPECT_EQ(GrowthFunction{}(1), 2);
  EXPECT_EQ(GrowthFunction{}(3), 3);
  EXPECT_EQ(GrowthFunction{}(6), 3);
  EXPECT_EQ(GrowthFunction{}(9), 4);
}

TEST(ScheduleTest, ExceptionalScheduleRecurrenceAndRange) {
  const std::int64_t T = 10000;
  const auto s = build_exceptional_schedule(T);
  const GrowthFunction f;
  EXPECT_EQ(s.b.front(), 1);
  for (std::size_t j = 0; j + 1 < s.b.size(); ++j) {
    const auto bj = s.b[j];
    EXPECT_EQ(s.b[j + 1], bj + f(bj));
    const auto ph = phi(bj);
    for (std::int64_t i = 0; i < f(bj) && bj + i <= T; ++i) {
      const auto l = s.ell[static_cast<std::size_t>(bj + i)];
      const mpq_class exact = mpq_class(ph) * (mpq_class(4 * i, f(bj)) - 2);
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), exact.get_num_mpz_t(), exact.get_den_mpz_t());
      EXPECT_EQ(l, fl.get_si());
      EXPECT_GE(l, -2 * ph);
      EXPECT_LE(l, 2 * ph);
    }
  }
}

TEST(ScheduleTest, TranslationsRealizeMinusEll) {
  const std::int64_t T = 300;
  const auto s = build_exceptional_schedule(T);
  const auto schedule = s.as_schedule();
  for (std::int64_t v = -5; v <= 5; ++v) {
    auto path = TreePath::from_signed_coordinate(v);
    for (std::int64_t t = 1; t <= T; ++t) {
      apply(schedule.at(static_cast<std::size_t>(t)), path, 2);
      ASSERT_EQ(path.signed_coordinate(), v - s.ell[static_cast<std::size_t>(t)]);
    }
  }
}

TEST(ScheduleTest, PowerGrowthFunction) {
  GrowthFunction f;
  f.kind = GrowthFunction::Kind::power;
  f.exponent = 0.5;
  EXPECT_EQ(f(1), 1);
  EXPECT_EQ(f(10), 4);
  const auto s = build_exceptional_schedule(100, f);
  for (std::size_t j = 0; j + 1 < s.b.size(); ++j) EXPECT_EQ(s.b[j + 1], s.b[j] + f(s.b[j]));
}

} // namespace
} // namespace permwalk
