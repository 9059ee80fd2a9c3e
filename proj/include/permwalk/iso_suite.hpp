#pragma once

// Exhaustive checks over every subset of a ball: the connectivity formula
// for |N(J)|, the isolated/connected lower bounds, and K-profile dominance
// over the quasi-ball (lazy) and half-quasi-balls (simple) of equal size.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "permwalk/error.hpp"
#include "permwalk/set_calculus.hpp"
#include "permwalk/tree.hpp"

namespace permwalk {

struct IsoSuiteOptions {
  bool iso_exact = true;
  bool lower_bounds = true;
  bool dominance = true;
  std::uint64_t budget = std::uint64_t{1} << 17; // subsets; 2^|B_2| for d = 4
  std::size_t max_listed = 20;
};

struct IsoSuiteReport {
  int d = 0;
  int ball_depth = 0;
  std::uint64_t subsets = 0;
  std::uint64_t iso_exact_violations = 0;
  std::uint64_t lower_bound_violations = 0;
  std::uint64_t lazy_dominance_violations = 0;
  std::uint64_t simple_dominance_violations = 0;
  std::vector<std::string> listed; // first few violations, readable

  std::uint64_t violations() const {
    return iso_exact_violations + lower_bound_violations + lazy_dominance_violations + simple_dominance_violations;
  }
};

/// 2^|B_r|, or 0 when it does not fit in 64 bits.
inline std::uint64_t iso_suite_cost(int d, int ball_depth) {
  const auto n = ball_size(d, ball_depth);
  return n >= 64 ? 0 : std::uint64_t{1} << n;
}

inline IsoSuiteReport run_iso_suite(int d, int ball_depth, const IsoSuiteOptions& opt = {}) {
  const auto cost = iso_suite_cost(d, ball_depth);
  if (cost == 0 || cost > opt.budget)
    throw BudgetExceeded("2^|B_" + std::to_string(ball_depth) + "| = 2^" + std::to_string(ball_size(d, ball_depth)) +
                         " subsets exceeds the budget of " + std::to_string(opt.budget));
  IsoSuiteReport report;
  report.d = d;
  report.ball_depth = ball_depth;
  const auto universe = ball_size(d, ball_depth);
  const TreeParams small(d, ball_depth + 1);
  const TreeParams wide(d, 2 * ball_depth + 4);

  // Extremal profiles depend only on |J|.
  std::vector<Partition> ball_profile, half_profile[2];
  if (opt.dominance) {
    for (std::uint64_t s = 0; s <= universe; ++s) {
      ball_profile.push_back(k_profile(VertexSet(quasi_ball(s, wide).members()), WalkMode::lazy, wide).parts);
      for (int par = 0; par <= 1; ++par)
        half_profile[par].push_back(
            k_profile(VertexSet(half_quasi_ball(s, par, wide).members(wide)), WalkMode::simple, wide).parts);
    }
  }

  auto note = [&](std::uint64_t mask, const std::string& what) {
    if (report.listed.size() < opt.max_listed) report.listed.push_back("subset mask " + std::to_string(mask) + ": " + what);
  };

  std::vector<VertexId> members;
  for (std::uint64_t mask = 0; mask < cost; ++mask) {
    members.clear();
    for (std::uint64_t i = 0; i < universe; ++i)
      if (mask >> i & 1) members.push_back(VertexId{i});
    const VertexSet set(members);
    ++report.subsets;
    if (opt.iso_exact) {
      const auto c = check_iso_exact(set, small);
      if (!c.holds) {
        ++report.iso_exact_violations;
        note(mask, "formula " + std::to_string(c.formula) + " != |N(J)| " + std::to_string(c.direct));
      }
    }
    if (opt.lower_bounds && !set.empty()) {
      for (auto mode : {WalkMode::lazy, WalkMode::simple}) {
        const auto n = static_cast<std::int64_t>(neighborhood(set, mode, small).size());
        const auto bound = iso_lower_bound(set, mode, small);
        if (n < bound) {
          ++report.lower_bound_violations;
          note(mask, std::string(to_string(mode)) + " neighborhood " + std::to_string(n) + " below bound " +
                         std::to_string(bound));
        }
      }
    }
    if (opt.dominance) {
      const auto s = set.size();
      if (!dominates(k_profile(set, WalkMode::lazy, small).parts, ball_profile[s])) {
        ++report.lazy_dominance_violations;
        note(mask, "lazy K-profile does not dominate the quasi-ball profile");
      }
      const auto simple = k_profile(set, WalkMode::simple, small).parts;
      for (int par = 0; par <= 1; ++par) {
        if (!dominates(simple, half_profile[par][s])) {
          ++report.simple_dominance_violations;
          note(mask, "simple K-profile does not dominate the parity-" + std::to_string(par) + " half-quasi-ball profile");
        }
      }
    }
  }
  return report;
}

} // namespace permwalk
