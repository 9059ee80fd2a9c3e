#pragma once

// Canonical breadth-first indexing of the rooted d-regular tree.
//
// The root v0 has d children, every other vertex has d-1. Vertices are
// numbered sphere by sphere; inside sphere n+1 the children of the j-th
// vertex of sphere n occupy a contiguous block, in the order of their
// parents. Navigation is pure index arithmetic, nothing is materialized.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "permwalk/error.hpp"

namespace permwalk {

struct VertexId {
  std::uint64_t index = 0;

  friend constexpr auto operator<=>(VertexId, VertexId) = default;
};

inline constexpr VertexId kRoot{0};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("tree size exceeds 64-bit index range");
  return r;
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw std::overflow_error("tree size exceeds 64-bit index range");
  return r;
}

inline void require_degree(int d) {
  if (d < 2)
    throw std::invalid_argument("tree degree must be >= 2, got " + std::to_string(d));
}

} // namespace detail

/// Number of vertices at depth exactly n: 1, d, d(d-1), ...; zero for n < 0.
inline std::uint64_t sphere_size(int d, int n) {
  detail::require_degree(d);
  if (n < 0) return 0;
  if (n == 0) return 1;
  std::uint64_t s = static_cast<std::uint64_t>(d);
  for (int k = 1; k < n; ++k) s = detail::checked_mul(s, static_cast<std::uint64_t>(d - 1));
  return s;
}

/// |B_n|, with |B_{-1}| = 0.
inline std::uint64_t ball_size(int d, int n) {
  std::uint64_t total = 0;
  for (int k = 0; k <= n; ++k) total = detail::checked_add(total, sphere_size(d, k));
  return total;
}

/// |B'_n|: vertices of depth <= n with the same parity as n.
inline std::uint64_t half_ball_size(int d, int n) {
  std::uint64_t total = 0;
  for (int k = n; k >= 0; k -= 2) total = detail::checked_add(total, sphere_size(d, k));
  return total;
}

/// Degree and truncation depth. Every operation that could leave B_D throws
/// BoundaryOverflow instead of clamping.
class TreeParams {
public:
  TreeParams(int d, int depth_cap) : d_(d), depth_cap_(depth_cap) {
    detail::require_degree(d);
    if (depth_cap < 0)
      throw std::invalid_argument("depth cap must be >= 0, got " + std::to_string(depth_cap));
    offsets_.reserve(static_cast<std::size_t>(depth_cap) + 2);
    std::uint64_t acc = 0;
    for (int n = 0; n <= depth_cap + 1; ++n) {
      offsets_.push_back(acc);
      if (n <= depth_cap) acc = detail::checked_add(acc, sphere_size(d, n));
    }
  }

  int d() const { return d_; }
  int depth_cap() const { return depth_cap_; }

  /// |B_D|.
  std::uint64_t vertex_count() const { return offsets_.back(); }

  /// Index of the first vertex of sphere n, i.e. |B_{n-1}|; valid for 0 <= n <= D+1.
  std::uint64_t sphere_offset(int n) const {
    if (n < 0 || n > depth_cap_ + 1)
      throw BoundaryOverflow("sphere " + std::to_string(n) + " outside depth cap " +
                             std::to_string(depth_cap_));
    return offsets_[static_cast<std::size_t>(n)];
  }

  bool contains(VertexId v) const { return v.index < vertex_count(); }

  friend bool operator==(const TreeParams& a, const TreeParams& b) {
    return a.d_ == b.d_ && a.depth_cap_ == b.depth_cap_;
  }

private:
  int d_;
  int depth_cap_;
  std::vector<std::uint64_t> offsets_;
};

struct SpherePosition {
  int depth = 0;
  std::uint64_t offset = 0; // position inside the sphere
};

inline void require_in_range(VertexId v, const TreeParams& params) {
  if (!params.contains(v))
    throw BoundaryOverflow("vertex " + std::to_string(v.index) + " outside B_" +
                           std::to_string(params.depth_cap()));
}

inline SpherePosition locate(VertexId v, const TreeParams& params) {
  require_in_range(v, params);
  int n = 0;
  while (params.sphere_offset(n + 1) <= v.index) ++n;
  return {n, v.index - params.sphere_offset(n)};
}

inline int depth(VertexId v, const TreeParams& params) { return locate(v, params).depth; }

inline VertexId vertex_at(SpherePosition pos, const TreeParams& params) {
  if (pos.depth < 0 || pos.depth > params.depth_cap())
    throw BoundaryOverflow("depth " + std::to_string(pos.depth) + " outside depth cap");
  return VertexId{params.sphere_offset(pos.depth) + pos.offset};
}

inline std::optional<VertexId> parent(VertexId v, const TreeParams& params) {
  const auto pos = locate(v, params);
  if (pos.depth == 0) return std::nullopt;
  if (pos.depth == 1) return kRoot;
  const auto branching = static_cast<std::uint64_t>(params.d() - 1);
  return vertex_at({pos.depth - 1, pos.offset / branching}, params);
}

inline int child_count(VertexId v, const TreeParams& params) {
  return v.index == 0 ? params.d() : params.d() - 1;
}

/// Children in canonical order. Throws when v sits on the truncation boundary.
inline std::vector<VertexId> children(VertexId v, const TreeParams& params) {
  const auto pos = locate(v, params);
  if (pos.depth == params.depth_cap())
    throw BoundaryOverflow("children of vertex " + std::to_string(v.index) +
                           " lie beyond depth cap " + std::to_string(params.depth_cap()));
  std::vector<VertexId> out;
  const auto first = pos.depth == 0
                         ? params.sphere_offset(1)
                         : params.sphere_offset(pos.depth + 1) +
                               static_cast<std::uint64_t>(params.d() - 1) * pos.offset;
  const int count = child_count(v, params);
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(VertexId{first + static_cast<std::uint64_t>(k)});
  return out;
}

/// N(v) = {v, parent(v)} u children(v), always d+1 vertices.
inline std::vector<VertexId> neighbors_closed(VertexId v, const TreeParams& params) {
  std::vector<VertexId> out{v};
  if (auto p = parent(v, params)) out.push_back(*p);
  for (auto c : children(v, params)) out.push_back(c);
  return out;
}

/// N'(v): the d neighbors of v, excluding v.
inline std::vector<VertexId> neighbors_open(VertexId v, const TreeParams& params) {
  std::vector<VertexId> out;
  if (auto p = parent(v, params)) out.push_back(*p);
  for (auto c : children(v, params)) out.push_back(c);
  return out;
}

inline int parity(VertexId v, const TreeParams& params) { return depth(v, params) % 2; }

/// Position of v inside the canonical subsequence of its parity class.
inline std::uint64_t parity_rank(VertexId v, const TreeParams& params) {
  const auto pos = locate(v, params);
  return half_ball_size(params.d(), pos.depth - 2) + pos.offset;
}

inline VertexId vertex_from_parity_rank(std::uint64_t rank, int par, const TreeParams& params) {
  for (int n = par; n <= params.depth_cap(); n += 2) {
    const auto below = half_ball_size(params.d(), n - 2);
    if (rank < below + sphere_size(params.d(), n)) return vertex_at({n, rank - below}, params);
  }
  throw BoundaryOverflow("parity rank " + std::to_string(rank) + " outside B_" +
                         std::to_string(params.depth_cap()));
}

/// Number of vertices of the given parity inside B_D.
inline std::uint64_t parity_class_count(int par, const TreeParams& params) {
  const int top = params.depth_cap() % 2 == par ? params.depth_cap() : params.depth_cap() - 1;
  return half_ball_size(params.d(), top);
}

/// |B| = |B_n| + a(d-1) + c with 0 <= c < d-1; for half-quasi-balls B'_n replaces B_n.
struct BallDecomposition {
  int n = 0;
  std::uint64_t a = 0;
  std::uint64_t c = 0;

  friend bool operator==(const BallDecomposition&, const BallDecomposition&) = default;
};

/// The prefix {v_0, ..., v_{size-1}} of the canonical order.
struct QuasiBall {
  std::uint64_t size = 0;

  bool contains(VertexId v) const { return v.index < size; }

  std::vector<VertexId> members() const {
    std::vector<VertexId> out;
    out.reserve(size);
    for (std::uint64_t i = 0; i < size; ++i) out.push_back(VertexId{i});
    return out;
  }

  BallDecomposition decompose(int d) const {
    int n = -1;
    while (ball_size(d, n + 1) <= size) ++n;
    const auto rest = size - ball_size(d, n);
    const auto branching = static_cast<std::uint64_t>(d - 1);
    return {n, rest / branching, rest % branching};
  }
};

/// Prefix of the canonical subsequence of V_parity.
struct HalfQuasiBall {
  std::uint64_t size = 0;
  int parity = 0;

  std::vector<VertexId> members(const TreeParams& params) const {
    std::vector<VertexId> out;
    out.reserve(size);
    for (std::uint64_t r = 0; r < size; ++r) out.push_back(vertex_from_parity_rank(r, parity, params));
    return out;
  }

  bool contains(VertexId v, const TreeParams& params) const {
    return depth(v, params) % 2 == parity && parity_rank(v, params) < size;
  }

  BallDecomposition decompose(int d) const {
    int n = parity - 2;
    while (half_ball_size(d, n + 2) <= size) n += 2;
    const auto rest = size - half_ball_size(d, n);
    const auto branching = static_cast<std::uint64_t>(d - 1);
    return {n, rest / branching, rest % branching};
  }
};

inline QuasiBall quasi_ball(std::uint64_t size, const TreeParams& params) {
  if (size > params.vertex_count())
    throw BoundaryOverflow("quasi-ball of size " + std::to_string(size) + " exceeds |B_" +
                           std::to_string(params.depth_cap()) + "|");
  return QuasiBall{size};
}

inline HalfQuasiBall half_quasi_ball(std::uint64_t size, int par, const TreeParams& params) {
  if (par != 0 && par != 1) throw std::invalid_argument("parity must be 0 or 1");
  if (size > parity_class_count(par, params))
    throw BoundaryOverflow("half-quasi-ball of size " + std::to_string(size) +
                           " exceeds its parity class inside the depth cap");
  return HalfQuasiBall{size, par};
}

/// A vertex of the untruncated tree as its sequence of child choices from
/// the root. The first entry is in [0, d), later ones in [0, d-1). Used by
/// simulation, where depths outgrow any indexable ball.
class TreePath {
public:
  TreePath() = default;
  explicit TreePath(std::deque<std::uint32_t> steps) : steps_(std::move(steps)) {}

  int depth() const { return static_cast<int>(steps_.size()); }
  bool is_root() const { return steps_.empty(); }
  const std::deque<std::uint32_t>& steps() const { return steps_; }
  std::deque<std::uint32_t>& steps() { return steps_; }

  /// Neighbor slots are numbered 0..d-1. At the root slot k is child k;
  /// elsewhere slot 0 is the parent and slot k the child k-1.
  void move(int slot) {
    if (steps_.empty()) {
      steps_.push_back(static_cast<std::uint32_t>(slot));
    } else if (slot == 0) {
      steps_.pop_back();
    } else {
      steps_.push_back(static_cast<std::uint32_t>(slot - 1));
    }
  }

  void to_parent() { steps_.pop_back(); }
  void to_child(std::uint32_t k) { steps_.push_back(k); }

  /// Canonical index; throws when deeper than the depth cap.
  VertexId to_vertex(const TreeParams& params) const {
    if (depth() > params.depth_cap())
      throw BoundaryOverflow("path of depth " + std::to_string(depth()) + " outside depth cap " +
                             std::to_string(params.depth_cap()));
    if (steps_.empty()) return kRoot;
    std::uint64_t offset = steps_.front();
    const auto branching = static_cast<std::uint64_t>(params.d() - 1);
    for (std::size_t i = 1; i < steps_.size(); ++i) offset = offset * branching + steps_[i];
    return vertex_at({depth(), offset}, params);
  }

  static TreePath from_vertex(VertexId v, const TreeParams& params) {
    auto pos = locate(v, params);
    std::deque<std::uint32_t> steps;
    const auto branching = static_cast<std::uint64_t>(params.d() - 1);
    for (int k = pos.depth; k > 1; --k) {
      steps.push_front(static_cast<std::uint32_t>(pos.offset % branching));
      pos.offset /= branching;
    }
    if (pos.depth >= 1) steps.push_front(static_cast<std::uint32_t>(pos.offset));
    return TreePath(std::move(steps));
  }

  /// For d = 2 the tree is the integer line: first step 0 is the positive side.
  std::int64_t signed_coordinate() const {
    if (steps_.empty()) return 0;
    const auto n = static_cast<std::int64_t>(steps_.size());
    return steps_.front() == 0 ? n : -n;
  }

  static TreePath from_signed_coordinate(std::int64_t z) {
    std::deque<std::uint32_t> steps;
    if (z != 0) {
      const auto n = static_cast<std::size_t>(z > 0 ? z : -z);
      steps.assign(n, 0u);
      steps.front() = z > 0 ? 0u : 1u;
    }
    return TreePath(std::move(steps));
  }

  friend bool operator==(const TreePath&, const TreePath&) = default;

private:
  std::deque<std::uint32_t> steps_;
};

/// Tree distance between two path-represented vertices.
inline int distance(const TreePath& a, const TreePath& b) {
  const auto& x = a.steps();
  const auto& y = b.steps();
  std::size_t common = 0;
  const auto limit = std::min(x.size(), y.size());
  while (common < limit && x[common] == y[common]) ++common;
  return static_cast<int>(x.size() + y.size() - 2 * common);
}

} // namespace permwalk

template <>
struct std::hash<permwalk::VertexId> {
  std::size_t operator()(permwalk::VertexId v) const noexcept {
    return std::hash<std::uint64_t>{}(v.index);
  }
};
