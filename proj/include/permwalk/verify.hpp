#pragma once

// Exact evolution of the plain walk p_t and the permuted walk q_t side by
// side, with per-time comparison checks, and exact enumeration of joint
// depth statistics over all step sequences.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "permwalk/distribution.hpp"
#include "permwalk/schedule.hpp"

namespace permwalk {

/// Smallest depth cap under which T steps of the schedule never leave the
/// truncated tree: steps need support inside B_{D-1}, images inside B_D.
inline int required_depth_cap(const Schedule& schedule, int horizon) {
  int reach = 0;
  int cap = 0;
  for (int t = 1; t <= horizon; ++t) {
    cap = std::max(cap, reach + 1);
    reach += 1;
    const auto& spec = schedule.at(static_cast<std::size_t>(t));
    if (const auto* e = std::get_if<ExplicitPerm>(&spec)) {
      reach = std::max(reach, detail::covering_depth(schedule.d, e->map.size()));
    } else if (const auto* tr = std::get_if<Transposition>(&spec)) {
      reach = std::max(reach, detail::covering_depth(schedule.d, std::max(tr->u, tr->w) + 1));
    } else if (std::holds_alternative<EdgeShift>(spec)) {
      reach += 1;
    } else if (const auto* tl = std::get_if<Translation>(&spec)) {
      reach += static_cast<int>(tl->offset < 0 ? -tl->offset : tl->offset);
    }
    cap = std::max(cap, reach);
  }
  return cap;
}

struct StepCheck {
  int t = 0;
  bool majorizes = false;
  bool arranged = false;              // greedily (lazy) or half-greedily (simple)
  bool depth_dominates = false;       // shift 0 (lazy) or 2 (simple)
  bool depth_dominates_unshifted = false;
  bool entropy_ordered = false;       // H(p_t) <= H(q_t), as Schur concavity gives from majorization
  double entropy_p = 0.0;
  double entropy_q = 0.0;
  std::size_t support_p = 0;
  std::size_t support_q = 0;
};

struct Violation {
  int t = 0;
  std::string check;
};

struct MajorizationReport {
  WalkMode mode = WalkMode::lazy;
  int d = 0;
  int horizon = 0;
  std::vector<StepCheck> steps;
  std::optional<Violation> first_violation;
  // Facts worth recording that are not violations, e.g. unshifted depth
  // domination failing for the simple walk.
  std::vector<std::string> notes;

  bool passed() const { return !first_violation.has_value(); }
};

/// Runs p_t (plain walk from the root) and q_t (walk permuted by the
/// schedule) for t <= horizon and records every comparison at every t.
/// For the simple walk the shifted depth domination only counts as a
/// violation when d > 2.
template <class S>
MajorizationReport verify_majorization_chain(const Schedule& schedule, const TreeParams& params, int horizon,
                                             const S& gamma, WalkMode mode) {
  if (schedule.d != params.d()) throw std::invalid_argument("schedule degree does not match tree degree");
  MajorizationReport report;
  report.mode = mode;
  report.d = params.d();
  report.horizon = horizon;

  auto p = Distribution<S>::point_mass(params);
  auto q = p;
  const int shift = mode == WalkMode::lazy ? 0 : 2;
  const bool shifted_is_claim = mode == WalkMode::lazy || params.d() > 2;

  auto record = [&](int t) {
    StepCheck c;
    c.t = t;
    const Rearrangement<S> rp(p), rq(q);
    c.majorizes = majorizes(rp, rq);
    c.arranged = mode == WalkMode::lazy ? is_greedily_arranged(p) : is_half_greedily_arranged(p);
    c.depth_dominates = depth_cdf_dominates(p, q, t == 0 ? 0 : shift);
    c.depth_dominates_unshifted = depth_cdf_dominates(p, q, 0);
    c.entropy_p = shannon_entropy(p);
    c.entropy_q = shannon_entropy(q);
    c.entropy_ordered = c.entropy_p <= c.entropy_q + 1e-12;
    c.support_p = p.support_size();
    c.support_q = q.support_size();

    auto flag = [&](bool ok, const char* name) {
      if (!ok && !report.first_violation) report.first_violation = Violation{t, name};
    };
    flag(c.majorizes, "majorization");
    flag(c.arranged, mode == WalkMode::lazy ? "greedy arrangement" : "half-greedy arrangement");
    if (shifted_is_claim) {
      flag(c.depth_dominates, "depth domination");
    } else if (!c.depth_dominates) {
      report.notes.push_back("t=" + std::to_string(t) + ": shifted depth domination fails (d = 2, not claimed)");
    }
    if (mode == WalkMode::simple && !c.depth_dominates_unshifted)
      report.notes.push_back("t=" + std::to_string(t) + ": unshifted depth domination fails");
    flag(c.entropy_ordered, "entropy ordering");
    report.steps.push_back(c);
  };

  record(0);
  for (int t = 1; t <= horizon; ++t) {
    p = walk_step(p, mode, gamma);
    q = permute(walk_step(q, mode, gamma), schedule.at(static_cast<std::size_t>(t)));
    record(t);
  }
  return report;
}

using JointStatistic = std::function<std::int64_t(std::span<const int>)>;

/// Exact law of statistic(|W_1|, ..., |W_h|) for the lazy walk with
/// laziness 1/(d+1), permuted by the schedule, by summing over all (d+1)^h
/// equally likely step sequences. Use the empty schedule for the plain walk.
inline std::map<std::int64_t, Rational> enumerate_joint(const Schedule& schedule, int horizon,
                                                        const JointStatistic& statistic,
                                                        std::uint64_t budget = std::uint64_t{1} << 22) {
  const int d = schedule.d;
  if (horizon < 0 || horizon > 10) throw BudgetExceeded("joint enumeration supports horizons up to 10");
  std::uint64_t leaves = 1;
  for (int i = 0; i < horizon; ++i) {
    leaves *= static_cast<std::uint64_t>(d + 1);
    if (leaves > budget)
      throw BudgetExceeded("(d+1)^h = " + std::to_string(leaves) + "+ exceeds enumeration budget " +
                           std::to_string(budget));
  }

  std::map<std::int64_t, std::uint64_t> counts;
  std::vector<int> depths(static_cast<std::size_t>(horizon));
  std::function<void(int, const TreePath&)> descend = [&](int t, const TreePath& at) {
    if (t == horizon) {
      ++counts[statistic(std::span<const int>(depths))];
      return;
    }
    for (int choice = 0; choice <= d; ++choice) {
      TreePath next = at;
      if (choice < d) next.move(choice);
      apply(schedule.at(static_cast<std::size_t>(t + 1)), next, d);
      depths[static_cast<std::size_t>(t)] = next.depth();
      descend(t + 1, next);
    }
  };
  descend(0, TreePath{});

  std::map<std::int64_t, Rational> law;
  const Rational total(mpz_class(std::to_string(leaves)));
  for (const auto& [value, count] : counts) {
    Rational r(mpz_class(std::to_string(count)));
    r /= total;
    law.emplace(value, r);
  }
  return law;
}

} // namespace permwalk
