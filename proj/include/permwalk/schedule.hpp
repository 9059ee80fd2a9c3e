#pragma once

// Permutation specs and schedules (pi_t). Specs act on canonical indices
// inside a truncated tree and on TreePath values of the untruncated tree.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "permwalk/error.hpp"
#include "permwalk/tree.hpp"

namespace permwalk {

struct IdentityPerm {
  friend bool operator==(const IdentityPerm&, const IdentityPerm&) = default;
};

/// Bijection of B_k given as the image of every index below |B_k|; identity
/// outside that ball.
struct ExplicitPerm {
  std::vector<std::uint64_t> map;
  friend bool operator==(const ExplicitPerm&, const ExplicitPerm&) = default;
};

struct Transposition {
  std::uint64_t u = 0;
  std::uint64_t w = 0;
  friend bool operator==(const Transposition&, const Transposition&) = default;
};

/// The automorphism exchanging the root with its neighbor `target` (an index
/// in [1, d]). The two halves of the tree across that edge are swapped;
/// remaining children are matched in sorted order.
struct EdgeShift {
  std::uint64_t target = 1;
  friend bool operator==(const EdgeShift&, const EdgeShift&) = default;
};

/// v -> v + offset on T_2 ≅ Z.
struct Translation {
  std::int64_t offset = 0;
  friend bool operator==(const Translation&, const Translation&) = default;
};

using PermutationSpec = std::variant<IdentityPerm, ExplicitPerm, Transposition, EdgeShift, Translation>;

inline bool is_automorphism_kind(const PermutationSpec& spec) {
  return std::holds_alternative<IdentityPerm>(spec) || std::holds_alternative<EdgeShift>(spec) ||
         std::holds_alternative<Translation>(spec);
}

inline const char* kind_name(const PermutationSpec& spec) {
  static constexpr const char* names[] = {"identity", "explicit", "transposition", "edge_shift", "translation"};
  return names[spec.index()];
}

namespace detail {

// Smallest k with |B_k| >= n.
inline int covering_depth(int d, std::uint64_t n) {
  int k = 0;
  while (ball_size(d, k) < n) ++k;
  return k;
}

inline void apply_edge_shift(std::uint64_t target, TreePath& path, int d) {
  if (target < 1 || target > static_cast<std::uint64_t>(d))
    throw std::invalid_argument("edge_shift target " + std::to_string(target) + " is not a root neighbor");
  const auto a = static_cast<std::uint32_t>(target - 1);
  auto& s = path.steps();
  if (s.empty()) {
    s.push_back(a);
  } else if (s.front() == a) {
    s.pop_front();
    if (!s.empty()) s.front() = s.front() < a ? s.front() : s.front() + 1;
  } else {
    s.front() = s.front() < a ? s.front() : s.front() - 1;
    s.push_front(a);
  }
}

inline std::uint64_t apply_index_map(const ExplicitPerm& p, std::uint64_t index) {
  return index < p.map.size() ? p.map[index] : index;
}

inline std::uint64_t apply_index_map(const Transposition& p, std::uint64_t index) {
  if (index == p.u) return p.w;
  if (index == p.w) return p.u;
  return index;
}

template <class IndexPerm>
void apply_index_perm_to_path(const IndexPerm& p, std::uint64_t domain_size, TreePath& path, int d) {
  const int reach = covering_depth(d, domain_size);
  if (path.depth() > reach) return;
  const TreeParams params(d, reach);
  const auto index = path.to_vertex(params).index;
  const auto image = apply_index_map(p, index);
  if (image != index) {
    const TreeParams image_params(d, covering_depth(d, image + 1));
    path = TreePath::from_vertex(VertexId{image}, image_params);
  }
}

} // namespace detail

/// In-place evaluation on an untruncated vertex.
inline void apply(const PermutationSpec& spec, TreePath& path, int d) {
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, IdentityPerm>) {
        } else if constexpr (std::is_same_v<P, ExplicitPerm>) {
          detail::apply_index_perm_to_path(p, p.map.size(), path, d);
        } else if constexpr (std::is_same_v<P, Transposition>) {
          detail::apply_index_perm_to_path(p, std::max(p.u, p.w) + 1, path, d);
        } else if constexpr (std::is_same_v<P, EdgeShift>) {
          detail::apply_edge_shift(p.target, path, d);
        } else {
          if (d != 2) throw std::invalid_argument("translation is only defined for d = 2");
          path = TreePath::from_signed_coordinate(path.signed_coordinate() + p.offset);
        }
      },
      spec);
}

/// Point evaluation inside the truncated tree; throws BoundaryOverflow when
/// the image leaves B_D.
inline VertexId apply(const PermutationSpec& spec, VertexId v, const TreeParams& params) {
  require_in_range(v, params);
  VertexId out = v;
  if (const auto* e = std::get_if<ExplicitPerm>(&spec)) {
    out = VertexId{detail::apply_index_map(*e, v.index)};
  } else if (const auto* t = std::get_if<Transposition>(&spec)) {
    out = VertexId{detail::apply_index_map(*t, v.index)};
  } else if (!std::holds_alternative<IdentityPerm>(spec)) {
    auto path = TreePath::from_vertex(v, params);
    apply(spec, path, params.d());
    return path.to_vertex(params);
  }
  require_in_range(out, params);
  return out;
}

/// Schedule (pi_1, pi_2, ...); times past the stored prefix use the identity.
struct Schedule {
  int d = 2;
  int depth = 0;
  std::vector<PermutationSpec> permutations;

  const PermutationSpec& at(std::size_t t) const {
    static const PermutationSpec identity = IdentityPerm{};
    if (t == 0 || t > permutations.size()) return identity;
    return permutations[t - 1];
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

/// `horizon` independent uniform bijections of B_radius.
template <class URBG>
Schedule random_bijection_schedule(int d, int radius, int horizon, URBG& rng) {
  Schedule s;
  s.d = d;
  s.depth = radius;
  const auto n = ball_size(d, radius);
  for (int t = 0; t < horizon; ++t) {
    ExplicitPerm perm;
    perm.map.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) perm.map[i] = i;
    std::shuffle(perm.map.begin(), perm.map.end(), rng);
    s.permutations.emplace_back(std::move(perm));
  }
  return s;
}

/// Pi_t(v) = pi_t(...pi_1(v)).
inline void apply_prefix(const Schedule& schedule, std::size_t t, TreePath& path) {
  for (std::size_t s = 1; s <= t; ++s) apply(schedule.at(s), path, schedule.d);
}

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> problems;

  void fail(std::string message) {
    valid = false;
    problems.push_back(std::move(message));
  }
};

/// Explicit maps must be bijections of a ball; automorphism kinds must map
/// every edge inside B_{depth_check} to an edge.
inline ValidationReport validate(const PermutationSpec& spec, int d, int depth_check) {
  ValidationReport report;
  if (const auto* e = std::get_if<ExplicitPerm>(&spec)) {
    const auto n = e->map.size();
    const int k = detail::covering_depth(d, n);
    if (ball_size(d, k) != n)
      report.fail("explicit map has " + std::to_string(n) + " entries, not the size of a ball B_k");
    std::unordered_map<std::uint64_t, std::uint64_t> preimage;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto image = e->map[i];
      if (image >= n) {
        report.fail("image " + std::to_string(image) + " of " + std::to_string(i) + " lies outside the domain");
        continue;
      }
      auto [it, inserted] = preimage.emplace(image, i);
      if (!inserted)
        report.fail("images of " + std::to_string(it->second) + " and " + std::to_string(i) + " collide at " +
                    std::to_string(image));
    }
    for (std::uint64_t j = 0; j < n; ++j)
      if (!preimage.contains(j)) report.fail("index " + std::to_string(j) + " is never hit");
    return report;
  }
  if (const auto* t = std::get_if<Transposition>(&spec)) {
    (void)t;
    return report;
  }
  if (const auto* s = std::get_if<EdgeShift>(&spec)) {
    if (s->target < 1 || s->target > static_cast<std::uint64_t>(d)) {
      report.fail("edge_shift target " + std::to_string(s->target) + " is not a neighbor of the root");
      return report;
    }
  }
  if (std::holds_alternative<Translation>(spec) && d != 2) {
    report.fail("translation requires d = 2");
    return report;
  }
  const TreeParams params(d, depth_check);
  std::vector<TreePath> images;
  images.reserve(params.vertex_count());
  for (std::uint64_t i = 0; i < params.vertex_count(); ++i) {
    auto path = TreePath::from_vertex(VertexId{i}, params);
    apply(spec, path, d);
    images.push_back(std::move(path));
  }
  for (std::uint64_t i = 1; i < params.vertex_count(); ++i) {
    const auto p = parent(VertexId{i}, params)->index;
    if (distance(images[i], images[p]) != 1)
      report.fail("edge (" + std::to_string(p) + ", " + std::to_string(i) + ") is not mapped to an edge");
  }
  for (std::uint64_t i = 0; i < images.size(); ++i)
    for (std::uint64_t j = i + 1; j < images.size(); ++j)
      if (images[i] == images[j])
        report.fail("images of " + std::to_string(i) + " and " + std::to_string(j) + " collide");
  return report;
}

/// floor(sqrt((4/3) t L(t))) with L(t) = ln ln t for t >= 16 and 1 below.
inline std::int64_t phi(std::int64_t t) {
  if (t < 1) throw std::domain_error("phi needs t >= 1");
  const long double tt = static_cast<long double>(t);
  const long double lll = t >= 16 ? std::log(std::log(tt)) : 1.0L;
  return static_cast<std::int64_t>(std::floor(std::sqrt(4.0L / 3.0L * tt * lll)));
}

/// Positive nondecreasing integer growth function f used for the epoch
/// lengths of the exceptional schedule.
struct GrowthFunction {
  enum class Kind { log2, power };
  Kind kind = Kind::log2;
  double exponent = 0.25; // power kind: ceil(t^exponent)

  std::int64_t operator()(std::int64_t t) const {
    if (kind == Kind::log2) {
      // ceil(log2(t + 2)) = bit width of t + 1
      return static_cast<std::int64_t>(std::bit_width(static_cast<std::uint64_t>(t + 1)));
    }
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(t), exponent))));
  }

  std::string name() const {
    return kind == Kind::log2 ? "log2" : "power:" + std::to_string(exponent);
  }
};

/// Translations on Z arranged so that Pi_t(v) = v - ell_t, where inside the
/// epoch [b_j, b_{j+1}) the shifts sweep [-2 phi(b_j), 2 phi(b_j)).
struct ExceptionalSchedule {
  GrowthFunction f;
  std::int64_t horizon = 0;
  std::vector<std::int64_t> b;    // b_0 = 1, b_{j+1} = b_j + f(b_j), until past the horizon
  std::vector<std::int64_t> ell;  // ell[0] = 0, ell[t] for 1 <= t <= horizon
  std::vector<std::int64_t> epoch_phi; // phi(b_j)

  /// pi_t as a translation by ell_{t-1} - ell_t.
  Translation translation_at(std::int64_t t) const {
    return Translation{ell[static_cast<std::size_t>(t - 1)] - ell[static_cast<std::size_t>(t)]};
  }

  Schedule as_schedule() const {
    Schedule s;
    s.d = 2;
    s.depth = 0;
    s.permutations.reserve(static_cast<std::size_t>(horizon));
    for (std::int64_t t = 1; t <= horizon; ++t) s.permutations.emplace_back(translation_at(t));
    return s;
  }
};

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const auto q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

inline ExceptionalSchedule build_exceptional_schedule(std::int64_t horizon, GrowthFunction f = {}) {
  if (horizon < 1) throw std::invalid_argument("exceptional schedule needs T >= 1");
  ExceptionalSchedule s;
  s.f = f;
  s.horizon = horizon;
  s.ell.assign(static_cast<std::size_t>(horizon) + 1, 0);
  std::int64_t bj = 1;
  while (bj <= horizon) {
    const auto fb = f(bj);
    if (fb < 1) throw std::logic_error("growth function must be positive");
    const auto ph = phi(bj);
    s.b.push_back(bj);
    s.epoch_phi.push_back(ph);
    for (std::int64_t i = 0; i < fb && bj + i <= horizon; ++i)
      s.ell[static_cast<std::size_t>(bj + i)] = floor_div(ph * (4 * i - 2 * fb), fb);
    bj += fb;
  }
  s.b.push_back(bj);
  return s;
}

} // namespace permwalk
