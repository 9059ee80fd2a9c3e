#pragma once

// Monte Carlo trajectories of lazy, simple and permuted walks, the coupling
// report shared by every coupling, and the automorphism coupling
// Y_t = pi_t ... pi_1 X_t.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "permwalk/error.hpp"
#include "permwalk/rng.hpp"
#include "permwalk/scalar.hpp"
#include "permwalk/schedule.hpp"
#include "permwalk/set_calculus.hpp"
#include "permwalk/tree.hpp"

namespace permwalk {

/// Runs fn(r) for r in [0, count) on up to `workers` threads. Results come
/// back in replicate order whatever the worker count.
template <class Fn>
auto run_replicates(std::size_t count, unsigned workers, Fn fn) -> std::vector<decltype(fn(std::size_t{0}))> {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<std::optional<Result>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t r = next++; r < count && !failed; r = next++) {
      try {
        slots[r].emplace(fn(r));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Result> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Exact Bernoulli(num/den) draw.
class RationalCoin {
public:
  explicit RationalCoin(const Rational& p) {
    if (p < 0 || p > 1) throw std::invalid_argument("probability outside [0, 1]");
    if (!p.get_num().fits_ulong_p() || !p.get_den().fits_ulong_p())
      throw std::invalid_argument("probability denominator too large");
    num_ = p.get_num().get_ui();
    den_ = p.get_den().get_ui();
  }
  bool operator()(Engine& rng) const { return uniform_below(rng, den_) < num_; }

private:
  std::uint64_t num_ = 0, den_ = 1;
};

struct WalkTrace {
  WalkMode kind = WalkMode::lazy;
  bool permuted = false;
  std::string schedule_id;
  std::uint64_t seed = 0;
  std::vector<int> depths;
  // Canonical indices, kept only on request and only inside the depth cap.
  std::optional<std::vector<VertexId>> positions;

  std::int64_t horizon() const { return static_cast<std::int64_t>(depths.size()) - 1; }
  double speed() const { return horizon() > 0 ? static_cast<double>(depths.back()) / static_cast<double>(horizon()) : 0.0; }
};

struct SimulationConfig {
  WalkMode kind = WalkMode::lazy;
  int d = 3;
  Rational gamma{0};      // lazy kind only; 0 selects 1/(d+1)
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  const Schedule* schedule = nullptr;
  std::string schedule_id;
  std::optional<int> position_cap; // record canonical positions inside B_cap
};

/// Draws one step: slot in [0, d) or -1 for staying put.
class StepSampler {
public:
  StepSampler(WalkMode kind, int d, const Rational& gamma) : d_(d), lazy_(kind == WalkMode::lazy) {
    if (lazy_) {
      const Rational g = gamma == 0 ? Rational(1, d + 1) : gamma;
      if (g < Rational(1, d + 1) || g >= 1) throw std::invalid_argument("laziness must lie in [1/(d+1), 1)");
      uniform_ = g == Rational(1, d + 1);
      if (!uniform_) stay_.emplace(g);
    }
  }

  int operator()(Engine& rng) const {
    if (!lazy_) return static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(d_)));
    if (uniform_) {
      const auto k = static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(d_ + 1)));
      return k == d_ ? -1 : k;
    }
    if ((*stay_)(rng)) return -1;
    return static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(d_)));
  }

private:
  int d_;
  bool lazy_;
  bool uniform_ = false;
  std::optional<RationalCoin> stay_;
};

/// One trajectory of the (optionally permuted) walk from the root.
inline WalkTrace simulate(const SimulationConfig& config) {
  if (config.d < 2) throw std::invalid_argument("degree must be at least 2");
  if (config.horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (config.schedule && config.schedule->d != config.d)
    throw std::invalid_argument("schedule degree does not match walk degree");
  WalkTrace trace;
  trace.kind = config.kind;
  trace.permuted = config.schedule != nullptr;
  trace.schedule_id = config.schedule_id;
  trace.seed = derive_seed(config.seed, config.replicate);
  trace.depths.reserve(static_cast<std::size_t>(config.horizon) + 1);
  std::optional<TreeParams> cap;
  if (config.position_cap) {
    cap.emplace(config.d, *config.position_cap);
    trace.positions.emplace();
    trace.positions->reserve(static_cast<std::size_t>(config.horizon) + 1);
  }

  Engine rng = make_engine(config.seed, config.replicate);
  const StepSampler step(config.kind, config.d, config.gamma);
  TreePath at;
  auto record = [&] {
    trace.depths.push_back(at.depth());
    if (cap) trace.positions->push_back(at.to_vertex(*cap));
  };
  record();
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    const int slot = step(rng);
    if (slot >= 0) at.move(slot);
    if (config.schedule) {
      const auto& spec = config.schedule->at(static_cast<std::size_t>(t));
      if (!std::holds_alternative<IdentityPerm>(spec)) apply(spec, at, config.d);
    }
    record();
  }
  return trace;
}

struct GapSummary {
  std::int64_t min = 0;
  double q25 = 0, median = 0, q75 = 0;
  std::int64_t max = 0;
  double mean = 0;
};

inline GapSummary summarize(const std::vector<std::int64_t>& values) {
  GapSummary s;
  if (values.empty()) return s;
  auto sorted = values;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return static_cast<double>(sorted[lo]) + (pos - static_cast<double>(lo)) * static_cast<double>(sorted[hi] - sorted[lo]);
  };
  s.min = sorted.front();
  s.max = sorted.back();
  s.q25 = quantile(0.25);
  s.median = quantile(0.5);
  s.q75 = quantile(0.75);
  double total = 0;
  for (auto v : values) total += static_cast<double>(v);
  s.mean = total / static_cast<double>(values.size());
  return s;
}

/// Per-time gap series of a coupling checked against a threshold curve.
/// A violation at t means the gap is on the wrong side of threshold(t).
struct CouplingReport {
  std::string kind;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  std::string gap_definition;
  std::string threshold_definition;
  std::vector<std::int64_t> gap;         // index t = 0..horizon
  std::vector<double> threshold;         // NaN where undefined
  std::int64_t violations = 0;
  std::optional<std::int64_t> last_violation;
  // Violation fraction over the dyadic windows (2^k, 2^{k+1}].
  std::vector<double> window_fractions;
  GapSummary summary;
  std::vector<std::string> notes;

  /// Smallest t0 such that no t in [t0, horizon] violates.
  std::int64_t settle_time() const { return last_violation ? *last_violation + 1 : 1; }
};

namespace detail {

// upper = true: violation when gap > threshold; otherwise when gap < threshold.
inline void score(CouplingReport& report, bool upper) {
  report.violations = 0;
  report.last_violation.reset();
  report.window_fractions.clear();
  std::int64_t window_hits = 0, window_size = 0, window_end = 2;
  for (std::int64_t t = 1; t <= report.horizon; ++t) {
    const double thr = report.threshold[static_cast<std::size_t>(t)];
    bool bad = false;
    if (!std::isnan(thr)) {
      const double g = static_cast<double>(report.gap[static_cast<std::size_t>(t)]);
      bad = upper ? g > thr : g < thr;
    }
    if (bad) {
      ++report.violations;
      report.last_violation = t;
      ++window_hits;
    }
    ++window_size;
    if (t == window_end || t == report.horizon) {
      report.window_fractions.push_back(static_cast<double>(window_hits) / static_cast<double>(window_size));
      window_hits = window_size = 0;
      window_end *= 2;
    }
  }
  report.summary = summarize(report.gap);
}

} // namespace detail

struct AutomorphismCoupling {
  WalkTrace x;
  WalkTrace y;
  CouplingReport report;
};

/// Drives X by one random stream and sets Y_t = Pi_t(X_t). The report
/// tracks |X_t| - |Y_t| against 2 ln t.
inline AutomorphismCoupling automorphism_coupling(const Schedule& schedule, std::int64_t horizon, std::uint64_t seed,
                                                  std::uint64_t replicate = 0, const Rational& gamma = Rational(0)) {
  for (std::size_t t = 1; t <= schedule.permutations.size(); ++t)
    if (!is_automorphism_kind(schedule.at(t)))
      throw std::invalid_argument(std::string("automorphism coupling needs automorphisms; pi_") + std::to_string(t) +
                                  " is " + kind_name(schedule.at(t)));
  const int d = schedule.d;
  std::vector<std::pair<std::int64_t, const PermutationSpec*>> active;
  for (std::size_t t = 1; t <= schedule.permutations.size() && static_cast<std::int64_t>(t) <= horizon; ++t)
    if (!std::holds_alternative<IdentityPerm>(schedule.at(t))) active.emplace_back(static_cast<std::int64_t>(t), &schedule.at(t));

  AutomorphismCoupling out;
  out.x.kind = out.y.kind = WalkMode::lazy;
  out.y.permuted = true;
  out.x.seed = out.y.seed = derive_seed(seed, replicate);
  Engine rng = make_engine(seed, replicate);
  const StepSampler step(WalkMode::lazy, d, gamma);
  TreePath x;
  out.x.depths.push_back(0);
  out.y.depths.push_back(0);
  std::size_t applied = 0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const int slot = step(rng);
    if (slot >= 0) x.move(slot);
    while (applied < active.size() && active[applied].first <= t) ++applied;
    TreePath y = x;
    for (std::size_t k = 0; k < applied; ++k) apply(*active[k].second, y, d);
    out.x.depths.push_back(x.depth());
    out.y.depths.push_back(y.depth());
  }

  auto& r = out.report;
  r.kind = "automorphism";
  r.horizon = horizon;
  r.seed = out.x.seed;
  r.gap_definition = "|X_t| - |Y_t|";
  r.threshold_definition = "2 ln t";
  r.gap.resize(static_cast<std::size_t>(horizon) + 1);
  r.threshold.assign(static_cast<std::size_t>(horizon) + 1, std::nan(""));
  for (std::int64_t t = 0; t <= horizon; ++t) {
    const auto i = static_cast<std::size_t>(t);
    r.gap[i] = out.x.depths[i] - out.y.depths[i];
    if (t >= 1) r.threshold[i] = 2.0 * std::log(static_cast<double>(t));
  }
  detail::score(r, true);
  return out;
}

} // namespace permwalk
