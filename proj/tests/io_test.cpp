#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "permwalk/io.hpp"

namespace permwalk {
namespace {

using R = Rational;

Schedule sample_schedule() {
  Schedule s;
  s.d = 3;
  s.depth = 4;
  s.permutations = {IdentityPerm{},
                    ExplicitPerm{{3, 2, 1, 0}},
                    Transposition{0, 17},
                    EdgeShift{2},
                    Translation{-9223372036854775807LL},
                    ExplicitPerm{{std::numeric_limits<std::uint64_t>::max(), 0}}};
  return s;
}

TEST(IoTest, ScheduleRoundTripIsBitExact) {
  const auto s = sample_schedule();
  const auto text = dump_schedule(s);
  const auto back = parse_schedule(text);
  EXPECT_EQ(back, s);
  EXPECT_EQ(dump_schedule(back), text);
}

TEST(IoTest, ScheduleKeyOrderAndLayout) {
  Schedule s;
  s.d = 2;
  s.depth = 1;
  s.permutations = {Transposition{1, 2}, Translation{-3}};
  EXPECT_EQ(to_json(s).dump(),
            R"({"d":2,"depth":1,"permutations":[{"type":"transposition","u":1,"w":2},{"type":"translation","offset":-3}]})");
}

TEST(IoTest, HandWrittenScheduleParses) {
  const auto s = parse_schedule(R"({"permutations": [{"type": "edge_shift", "target": 1}, {"type": "identity"}], "depth": 0, "d": 3})");
  EXPECT_EQ(s.d, 3);
  ASSERT_EQ(s.permutations.size(), 2u);
  EXPECT_EQ(std::get<EdgeShift>(s.permutations[0]).target, 1u);
}

TEST(IoTest, ScheduleErrors) {
  EXPECT_THROW(parse_schedule("{"), FormatError);
  EXPECT_THROW(parse_schedule(R"({"d": 3, "depth": 1})"), FormatError);
  EXPECT_THROW(parse_schedule(R"({"d": 3, "depth": 1, "permutations": [{"type": "rotate"}]})"), FormatError);
  EXPECT_THROW(parse_schedule(R"({"d": 3, "depth": 1, "permutations": [{"type": "edge_shift"}]})"), FormatError);
  EXPECT_THROW(parse_schedule(R"({"d": 3, "depth": 1, "permutations": [{"type": "explicit", "map": [0, -1]}]})"), FormatError);
  EXPECT_THROW(parse_schedule(R"({"d": 1, "depth": 1, "permutations": []})"), FormatError);
  EXPECT_THROW(load_schedule("/nonexistent/schedule.json"), FormatError);
}

TEST(IoTest, RationalDistributionRoundTrip) {
  const TreeParams params(3, 6);
  auto p = Distribution<R>::point_mass(params);
  for (int t = 0; t < 5; ++t) p = lazy_step(p, R(1, 4));
  const auto j = to_json(p);
  EXPECT_EQ(j["mode"], "rational");
  EXPECT_EQ(j["atoms"][0].size(), 3u);
  const auto back = distribution_from_json<R>(Json::parse(j.dump()));
  EXPECT_EQ(back, p);
}

TEST(IoTest, HugeRationalsUseStrings) {
  const TreeParams params(2, 1);
  R tiny(mpz_class(1), mpz_class("100000000000000000000000000000"));
  const Distribution<R> p(params, {{VertexId{0}, 1 - tiny}, {VertexId{1}, tiny}});
  const auto j = to_json(p);
  EXPECT_TRUE(j["atoms"][1][2].is_string());
  EXPECT_EQ(distribution_from_json<R>(Json::parse(j.dump())), p);
}

TEST(IoTest, FloatDistributionRoundTrip) {
  const TreeParams params(4, 4);
  auto p = Distribution<double>::point_mass(params);
  for (int t = 0; t < 4; ++t) p = simple_step(p);
  const auto j = to_json(p);
  EXPECT_EQ(j["atoms"][0].size(), 2u);
  const auto back = distribution_from_json<double>(Json::parse(j.dump()));
  ASSERT_EQ(back.atoms().size(), p.atoms().size());
  for (std::size_t i = 0; i < p.atoms().size(); ++i) EXPECT_EQ(back.atoms()[i].weight, p.atoms()[i].weight);
  // Exact rows also read into float mode.
  const auto exact = to_json(Distribution<R>::point_mass(params));
  EXPECT_EQ(distribution_from_json<double>(exact)[kRoot], 1.0);
}

TEST(IoTest, DistributionErrors) {
  EXPECT_THROW(distribution_from_json<R>(Json::parse(R"({"d": 3, "depth": 1, "atoms": [[0, 1, 2]]})")), FormatError);
  EXPECT_THROW(distribution_from_json<R>(Json::parse(R"({"d": 3, "depth": 1, "atoms": [[9, 1, 1]]})")), FormatError);
  EXPECT_THROW(distribution_from_json<R>(Json::parse(R"({"d": 3, "depth": 1, "atoms": [[0, 1.0]]})")), FormatError);
  EXPECT_THROW(distribution_from_json<R>(Json::parse(R"({"d": 3, "depth": 1, "atoms": [[0, 1, 0]]})")), FormatError);
}

TEST(IoTest, ReportJson) {
  CouplingReport r;
  r.kind = "epochs";
  r.horizon = 3;
  r.seed = 12;
  r.gap = {0, 1, -1, 2};
  r.threshold = {std::nan(""), 0.5, 0.5, 0.5};
  detail::score(r, false);
  const auto j = to_json(r, true);
  EXPECT_EQ(j["violations"], 1);
  EXPECT_EQ(j["last_violation"], 2);
  EXPECT_EQ(j["settle_time"], 3);
  EXPECT_TRUE(j["threshold_series"][0].is_null());
  EXPECT_EQ(j["gap_series"][3], 2);
  EXPECT_EQ(j["summary"]["max"], 2);
  EXPECT_FALSE(to_json(r).contains("gap_series"));
}

TEST(IoTest, TraceCsv) {
  TraceTable table;
  table.depth_x = {0, 1, 2};
  table.depth_y = std::vector<std::int64_t>{0, 1, 0};
  table.gap = std::vector<std::int64_t>{0, 0, 2};
  table.phi = std::vector<std::int64_t>{0, 1, 1};
  std::ostringstream out;
  write_trace_csv(out, table);
  EXPECT_EQ(out.str(), "t,depth_X,depth_Y,gap,phi_t\n0,0,0,0,0\n1,1,1,0,1\n2,2,0,2,1\n");
  table.phi->pop_back();
  std::ostringstream bad;
  EXPECT_THROW(write_trace_csv(bad, table), std::invalid_argument);
}

TEST(IoTest, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.25), "0.25");
}

TEST(IoTest, ParseRationalIsDecimal) {
  EXPECT_EQ(parse_rational("0.6667"), R(6667, 10000));
  EXPECT_EQ(parse_rational("2/3"), R(2, 3));
  EXPECT_EQ(parse_rational("4/6"), R(2, 3));
  EXPECT_EQ(parse_rational("07"), R(7));
  EXPECT_EQ(parse_rational("010/012"), R(5, 6));
  EXPECT_EQ(parse_rational("-.5"), R(-1, 2));
  EXPECT_THROW(parse_rational("0x10"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational(""), std::invalid_argument);
}

} // namespace
} // namespace permwalk
