#pragma once

// Finite-set combinatorics on the truncated tree: neighborhood multiplicity
// profiles K_i(J), induced connectivity counts, the exact neighborhood-size
// identity, isoperimetric lower bounds, and the dominance order.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "permwalk/scalar.hpp"
#include "permwalk/tree.hpp"
#include "permwalk/union_find.hpp"

namespace permwalk {

enum class WalkMode { lazy, simple };

inline const char* to_string(WalkMode mode) { return mode == WalkMode::lazy ? "lazy" : "simple"; }

/// Sorted, duplicate-free set of vertices.
class VertexSet {
public:
  VertexSet() = default;

  explicit VertexSet(std::vector<VertexId> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
      throw std::invalid_argument("vertex set contains duplicates");
  }

  VertexSet(std::initializer_list<std::uint64_t> indices) : VertexSet(to_ids(indices)) {}

  static VertexSet range(std::uint64_t begin, std::uint64_t end) {
    std::vector<VertexId> m;
    for (auto i = begin; i < end; ++i) m.push_back(VertexId{i});
    return VertexSet(std::move(m));
  }

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(VertexId v) const { return std::binary_search(members_.begin(), members_.end(), v); }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  const std::vector<VertexId>& members() const { return members_; }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

private:
  static std::vector<VertexId> to_ids(std::initializer_list<std::uint64_t> indices) {
    std::vector<VertexId> out;
    for (auto i : indices) out.push_back(VertexId{i});
    return out;
  }

  std::vector<VertexId> members_;
};

inline void require_in_range(const VertexSet& set, const TreeParams& params) {
  if (!set.empty()) require_in_range(set.members().back(), params);
}

/// Fixed-length nonincreasing sequence of nonnegative integers.
class Partition {
public:
  Partition() = default;

  explicit Partition(std::vector<std::int64_t> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] < 0) throw std::invalid_argument("partition parts must be nonnegative");
      if (i > 0 && parts_[i] > parts_[i - 1])
        throw std::invalid_argument("partition parts must be nonincreasing");
    }
  }

  Partition(std::initializer_list<std::int64_t> parts) : Partition(std::vector<std::int64_t>(parts)) {}

  std::size_t length() const { return parts_.size(); }
  std::int64_t total() const { return std::accumulate(parts_.begin(), parts_.end(), std::int64_t{0}); }
  std::int64_t operator[](std::size_t i) const { return parts_[i]; }
  const std::vector<std::int64_t>& parts() const { return parts_; }
  auto begin() const { return parts_.begin(); }
  auto end() const { return parts_.end(); }

  friend bool operator==(const Partition&, const Partition&) = default;

private:
  std::vector<std::int64_t> parts_;
};

struct KProfile {
  WalkMode mode = WalkMode::lazy;
  Partition parts;
};

namespace detail {

inline std::vector<VertexId> neighborhood_of(VertexId v, WalkMode mode, const TreeParams& params) {
  return mode == WalkMode::lazy ? neighbors_closed(v, params) : neighbors_open(v, params);
}

// |N(v) ∩ J| (or |N'(v) ∩ J|) for every v with a nonzero count.
inline std::unordered_map<VertexId, int> multiplicities(const VertexSet& set, WalkMode mode,
                                                         const TreeParams& params) {
  std::unordered_map<VertexId, int> count;
  count.reserve(set.size() * static_cast<std::size_t>(params.d() + 1));
  // u ∈ N(v) iff v ∈ N(u), so scanning the neighborhoods of members counts
  // members inside each neighborhood.
  for (auto v : set)
    for (auto u : neighborhood_of(v, mode, params)) ++count[u];
  return count;
}

} // namespace detail

/// N(J) (lazy) or N'(J) (simple).
inline VertexSet neighborhood(const VertexSet& set, WalkMode mode, const TreeParams& params) {
  std::vector<VertexId> out;
  for (const auto& [u, c] : detail::multiplicities(set, mode, params)) out.push_back(u);
  return VertexSet(std::move(out));
}

/// K_i(J) = {v : |N(v) ∩ J| >= i} for i in [1, d+1]; K'_i with open
/// neighborhoods for i in [1, d].
inline VertexSet k_set(const VertexSet& set, int i, WalkMode mode, const TreeParams& params) {
  std::vector<VertexId> out;
  for (const auto& [u, c] : detail::multiplicities(set, mode, params))
    if (c >= i) out.push_back(u);
  return VertexSet(std::move(out));
}

/// (|K_1(J)|, ..., |K_{d+1}(J)|) by direct multiplicity counting.
inline KProfile k_profile(const VertexSet& set, WalkMode mode, const TreeParams& params) {
  const int length = mode == WalkMode::lazy ? params.d() + 1 : params.d();
  std::vector<std::int64_t> histogram(static_cast<std::size_t>(length) + 1, 0);
  for (const auto& [u, c] : detail::multiplicities(set, mode, params)) ++histogram[static_cast<std::size_t>(c)];
  std::vector<std::int64_t> parts(static_cast<std::size_t>(length), 0);
  std::int64_t at_least = 0;
  for (int i = length; i >= 1; --i) {
    at_least += histogram[static_cast<std::size_t>(i)];
    parts[static_cast<std::size_t>(i - 1)] = at_least;
  }
  return {mode, Partition(std::move(parts))};
}

struct Connectivity {
  std::int64_t kappa1 = 0; // components of the induced subgraph
  std::int64_t kappa2 = 0; // components once distance-2 pairs are joined
};

/// Both counts come from one pass; pairs at distance <= 2 are
/// (child, parent), (child, grandparent) and siblings.
inline Connectivity connectivity(const VertexSet& set, const TreeParams& params) {
  require_in_range(set, params);
  const auto& m = set.members();
  std::unordered_map<VertexId, std::size_t> slot;
  slot.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) slot.emplace(m[i], i);

  DisjointSet near(m.size());
  DisjointSet square(m.size());
  std::unordered_map<VertexId, std::size_t> first_child_seen;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto p = parent(m[i], params);
    if (!p) continue;
    if (auto it = slot.find(*p); it != slot.end()) {
      near.unite(i, it->second);
      square.unite(i, it->second);
    }
    if (auto g = parent(*p, params)) {
      if (auto it = slot.find(*g); it != slot.end()) square.unite(i, it->second);
    }
    auto [it, inserted] = first_child_seen.emplace(*p, i);
    if (!inserted) square.unite(i, it->second);
  }
  return {static_cast<std::int64_t>(near.components()), static_cast<std::int64_t>(square.components())};
}

inline std::int64_t kappa1(const VertexSet& set, const TreeParams& params) {
  return connectivity(set, params).kappa1;
}

inline std::int64_t kappa2(const VertexSet& set, const TreeParams& params) {
  return connectivity(set, params).kappa2;
}

struct IsoSplit {
  VertexSet isolated;
  VertexSet connected;
};

/// iso(J): members with no neighbor in J; con(J) = J \ iso(J).
inline IsoSplit iso_con(const VertexSet& set, const TreeParams& params) {
  require_in_range(set, params);
  std::unordered_set<VertexId> has_child_in_set;
  for (auto v : set)
    if (auto p = parent(v, params)) has_child_in_set.insert(*p);
  std::vector<VertexId> iso, con;
  for (auto v : set) {
    const auto p = parent(v, params);
    const bool touches = (p && set.contains(*p)) || has_child_in_set.contains(v);
    (touches ? con : iso).push_back(v);
  }
  return {VertexSet(std::move(iso)), VertexSet(std::move(con))};
}

struct IsoExactCheck {
  std::int64_t formula = 0;   // (d-1)|J| + kappa1 + kappa2
  std::int64_t direct = 0;    // |N(J)| by union
  bool holds = false;
  bool degenerate_empty = false;
};

inline std::int64_t iso_exact(const VertexSet& set, const TreeParams& params) {
  const auto c = connectivity(set, params);
  return static_cast<std::int64_t>(params.d() - 1) * static_cast<std::int64_t>(set.size()) + c.kappa1 +
         c.kappa2;
}

/// Compares the connectivity formula for |N(J)| against the direct union.
/// Needs N(J) inside the depth cap. The empty set is accepted and flagged.
inline IsoExactCheck check_iso_exact(const VertexSet& set, const TreeParams& params) {
  IsoExactCheck out;
  out.formula = iso_exact(set, params);
  out.direct = static_cast<std::int64_t>(neighborhood(set, WalkMode::lazy, params).size());
  out.holds = out.formula == out.direct;
  out.degenerate_empty = set.empty();
  return out;
}

/// Lower bound on |N(J)| (lazy) or |N'(J)| (simple) in terms of isolated
/// and connected members. Throws std::domain_error on the empty set.
inline std::int64_t iso_lower_bound(const VertexSet& set, WalkMode mode, const TreeParams& params) {
  if (set.empty()) throw std::domain_error("isoperimetric lower bound needs a nonempty set");
  const auto d = static_cast<std::int64_t>(params.d());
  if (mode == WalkMode::lazy) {
    const auto split = iso_con(set, params);
    if (split.connected.empty()) return 1 + d * static_cast<std::int64_t>(set.size());
    return 2 + d * static_cast<std::int64_t>(split.isolated.size()) +
           (d - 1) * static_cast<std::int64_t>(split.connected.size());
  }
  std::int64_t by_parity[2] = {0, 0};
  for (auto v : set) ++by_parity[parity(v, params)];
  std::int64_t bound = 0;
  for (auto count : by_parity)
    if (count > 0) bound += 1 + (d - 1) * count;
  return bound;
}

/// Closed-form K-profile of a quasi-ball from its decomposition
/// |B| = |B_n| + a(d-1) + c. Advisory only: at n = 0 the formula overcounts
/// by one because the root has no parent; k_profile is the ground truth.
inline std::vector<std::int64_t> closed_form_profile(QuasiBall ball, int d) {
  if (ball.size <= 1) throw std::invalid_argument("closed-form profile needs |B| > 1");
  const auto dec = ball.decompose(d);
  const auto s = static_cast<std::int64_t>(ball.size);
  const auto base = static_cast<std::int64_t>(ball_size(d, dec.n - 1) + dec.a);
  const auto c = static_cast<std::int64_t>(dec.c);
  std::vector<std::int64_t> m(static_cast<std::size_t>(d) + 1);
  m[0] = (d - 1) * s + 2;
  m[1] = s;
  for (std::int64_t i = 3; i <= d + 1; ++i) m[static_cast<std::size_t>(i - 1)] = i <= c + 2 ? base + 1 : base;
  return m;
}

/// Non-lazy analog over a half-quasi-ball, |B| = |B'_n| + a(d-1) + c.
inline std::vector<std::int64_t> closed_form_profile(HalfQuasiBall ball, int d) {
  if (ball.size <= 1) throw std::invalid_argument("closed-form profile needs |B| > 1");
  const auto dec = ball.decompose(d);
  const auto s = static_cast<std::int64_t>(ball.size);
  const auto base = static_cast<std::int64_t>(half_ball_size(d, dec.n - 2) + dec.a);
  const auto c = static_cast<std::int64_t>(dec.c);
  std::vector<std::int64_t> m(static_cast<std::size_t>(d));
  m[0] = (d - 1) * s + 1;
  for (std::int64_t i = 2; i <= d; ++i) m[static_cast<std::size_t>(i - 1)] = i <= c + 1 ? base + 1 : base;
  return m;
}

/// mu ≻ lambda in the dominance order: equal totals and every prefix sum of
/// mu at least that of lambda.
template <class Seq>
bool dominates_sequence(const Seq& mu, const Seq& lambda) {
  if (mu.size() != lambda.size()) throw std::invalid_argument("dominance needs equal lengths");
  using T = std::decay_t<decltype(mu[0])>;
  T pm{0}, pl{0};
  for (std::size_t r = 0; r < mu.size(); ++r) {
    pm += mu[r];
    pl += lambda[r];
    if (pl > pm) return false;
  }
  return pm == pl;
}

inline bool dominates(const Partition& mu, const Partition& lambda) {
  if (mu.length() != lambda.length())
    throw std::invalid_argument("dominance needs partitions of equal length, got " +
                                std::to_string(mu.length()) + " and " + std::to_string(lambda.length()));
  return dominates_sequence(mu.parts(), lambda.parts());
}

/// Piecewise-linear function through breakpoints with strictly increasing x.
template <class S>
class PiecewiseLinear {
public:
  PiecewiseLinear(std::vector<S> xs, std::vector<S> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size() || xs_.size() < 2)
      throw std::invalid_argument("piecewise-linear function needs >= 2 matching breakpoints");
    for (std::size_t i = 1; i < xs_.size(); ++i)
      if (!(xs_[i - 1] < xs_[i])) throw std::invalid_argument("breakpoints must be strictly increasing");
  }

  /// Successive slopes nonincreasing, compared by cross-multiplication.
  bool is_concave() const {
    for (std::size_t i = 1; i + 1 < xs_.size(); ++i) {
      const S left = (ys_[i] - ys_[i - 1]) * (xs_[i + 1] - xs_[i]);
      const S right = (ys_[i + 1] - ys_[i]) * (xs_[i] - xs_[i - 1]);
      if (!ScalarTraits<S>::leq(right, left)) return false;
    }
    return true;
  }

  S operator()(const S& x) const {
    if (x < xs_.front() || x > xs_.back()) throw std::domain_error("argument outside breakpoint range");
    auto hi = static_cast<std::size_t>(std::lower_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
    if (xs_[hi] == x) return ys_[hi];
    const auto lo = hi - 1;
    return S(ys_[lo] + (ys_[hi] - ys_[lo]) * (x - xs_[lo]) / (xs_[hi] - xs_[lo]));
  }

  const std::vector<S>& xs() const { return xs_; }
  const std::vector<S>& ys() const { return ys_; }

private:
  std::vector<S> xs_;
  std::vector<S> ys_;
};

/// Karamata / Hardy-Littlewood-Polya: for concave f and mu ≻ lambda,
/// sum f(mu_i) <= sum f(lambda_i). Returns whether the inequality holds;
/// throws if f is not concave or mu does not dominate lambda.
template <class S>
bool karamata_check(const PiecewiseLinear<S>& f, const Partition& mu, const Partition& lambda) {
  if (!f.is_concave()) throw std::invalid_argument("karamata_check needs a concave function");
  if (!dominates(mu, lambda)) throw std::invalid_argument("karamata_check needs mu to dominate lambda");
  S left{0}, right{0};
  for (auto x : mu) left += f(S(static_cast<long>(x)));
  for (auto x : lambda) right += f(S(static_cast<long>(x)));
  return ScalarTraits<S>::leq(left, right);
}

} // namespace permwalk
