#pragma once

// Finitely supported probability distributions on the truncated tree and the
// operators acting on them: lazy and simple walk steps, permutation,
// decreasing rearrangement, majorization, arrangement predicates, entropy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "permwalk/error.hpp"
#include "permwalk/scalar.hpp"
#include "permwalk/schedule.hpp"
#include "permwalk/set_calculus.hpp"
#include "permwalk/tree.hpp"

namespace permwalk {

template <class S>
struct Atom {
  VertexId vertex;
  S weight;
};

template <class S>
class Distribution {
public:
  using Scalar = S;
  using Traits = ScalarTraits<S>;

  /// Validates nonnegativity, unit mass and the support range. Zero atoms
  /// are dropped; repeated vertices are rejected.
  Distribution(TreeParams params, std::vector<Atom<S>> atoms) : params_(std::move(params)) {
    S total{0};
    for (auto& a : atoms) {
      if (a.weight < S(0)) throw std::invalid_argument("negative probability at vertex " + std::to_string(a.vertex.index));
      require_in_range(a.vertex, params_);
      total += a.weight;
    }
    if (!Traits::eq(total, S(1))) throw std::invalid_argument("distribution mass is not 1");
    std::erase_if(atoms, [](const Atom<S>& a) { return a.weight == S(0); });
    std::sort(atoms.begin(), atoms.end(), [](const auto& x, const auto& y) { return x.vertex < y.vertex; });
    for (std::size_t i = 1; i < atoms.size(); ++i)
      if (atoms[i].vertex == atoms[i - 1].vertex)
        throw std::invalid_argument("vertex " + std::to_string(atoms[i].vertex.index) + " listed twice");
    atoms_ = std::move(atoms);
  }

  static Distribution point_mass(TreeParams params, VertexId v = kRoot) {
    return Distribution(std::move(params), {Atom<S>{v, S(1)}});
  }

  /// Uniform on the given vertices.
  static Distribution uniform(TreeParams params, const VertexSet& set) {
    std::vector<Atom<S>> atoms;
    const S w = S(1) / S(static_cast<long>(set.size()));
    for (auto v : set) atoms.push_back({v, w});
    return Distribution(std::move(params), std::move(atoms));
  }

  const TreeParams& params() const { return params_; }
  const std::vector<Atom<S>>& atoms() const { return atoms_; }
  std::size_t support_size() const { return atoms_.size(); }

  S operator[](VertexId v) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), v,
                               [](const Atom<S>& a, VertexId x) { return a.vertex < x; });
    return it != atoms_.end() && it->vertex == v ? it->weight : S(0);
  }

  S mass(const VertexSet& set) const {
    S total{0};
    for (auto v : set) total += (*this)[v];
    return total;
  }

  S total_mass() const {
    S total{0};
    for (const auto& a : atoms_) total += a.weight;
    return total;
  }

  int max_depth() const {
    int m = 0;
    for (const auto& a : atoms_) m = std::max(m, depth(a.vertex, params_));
    return m;
  }

  /// Same atoms viewed inside a different depth cap.
  Distribution with_params(TreeParams params) const {
    for (const auto& a : atoms_) require_in_range(a.vertex, params);
    return Distribution(std::move(params), atoms_, Trusted{});
  }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    if (!(a.params_ == b.params_) || a.atoms_.size() != b.atoms_.size()) return false;
    for (std::size_t i = 0; i < a.atoms_.size(); ++i)
      if (a.atoms_[i].vertex != b.atoms_[i].vertex || !(a.atoms_[i].weight == b.atoms_[i].weight)) return false;
    return true;
  }

  struct Trusted {};
  // Operators that conserve mass by construction skip re-validation. Atoms
  // must already be sorted, distinct and positive.
  Distribution(TreeParams params, std::vector<Atom<S>> atoms, Trusted)
      : params_(std::move(params)), atoms_(std::move(atoms)) {}

private:
  TreeParams params_;
  std::vector<Atom<S>> atoms_;
};

/// Decreasing rearrangement: prefix[s] = p*(s) for s up to the support size.
template <class S>
class Rearrangement {
public:
  explicit Rearrangement(const Distribution<S>& p) {
    sorted_.reserve(p.support_size());
    for (const auto& a : p.atoms()) sorted_.push_back(a.weight);
    // Stable sort over atoms already ordered by vertex index: ties keep index order.
    std::stable_sort(sorted_.begin(), sorted_.end(), [](const S& x, const S& y) { return x > y; });
    prefix_.reserve(sorted_.size() + 1);
    prefix_.push_back(S(0));
    for (const auto& w : sorted_) prefix_.push_back(S(prefix_.back() + w));
  }

  /// p*(s): total mass of the s largest atoms; the full mass beyond the support.
  const S& operator()(std::size_t s) const { return s < prefix_.size() ? prefix_[s] : prefix_.back(); }

  /// p* at a possibly negative argument, which we define as 0.
  S at(std::int64_t s) const { return s <= 0 ? S(0) : (*this)(static_cast<std::size_t>(s)); }

  std::size_t support_size() const { return sorted_.size(); }
  const std::vector<S>& sorted_weights() const { return sorted_; }
  const std::vector<S>& prefix() const { return prefix_; }

  /// Piecewise-linear interpolation through (s, p*(s)) for s in [0, reach],
  /// which is concave because the sorted increments are nonincreasing.
  PiecewiseLinear<S> interpolation(std::size_t reach) const {
    std::vector<S> xs, ys;
    for (std::size_t s = 0; s <= std::max<std::size_t>(reach, 1); ++s) {
      xs.push_back(S(static_cast<long>(s)));
      ys.push_back((*this)(s));
    }
    return PiecewiseLinear<S>(std::move(xs), std::move(ys));
  }

private:
  std::vector<S> sorted_;
  std::vector<S> prefix_;
};

template <class S>
S p_star(const Distribution<S>& p, std::size_t s) {
  return Rearrangement<S>(p)(s);
}

/// p*(j) >= q*(j) for every j; exact in rational mode, 1e-12 slack in float mode.
template <class S>
bool majorizes(const Rearrangement<S>& p, const Rearrangement<S>& q) {
  const auto reach = std::max(p.support_size(), q.support_size());
  for (std::size_t j = 1; j <= reach; ++j)
    if (!ScalarTraits<S>::leq(q(j), p(j))) return false;
  return true;
}

template <class S>
bool majorizes(const Distribution<S>& p, const Distribution<S>& q) {
  return majorizes(Rearrangement<S>(p), Rearrangement<S>(q));
}

/// Weights nonincreasing along the canonical order, i.e. the support is a
/// quasi-ball and the weights decrease along it.
template <class S>
bool is_greedily_arranged(const Distribution<S>& p) {
  const auto& atoms = p.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].vertex.index != i) return false;
    if (i > 0 && !ScalarTraits<S>::leq(atoms[i].weight, atoms[i - 1].weight)) return false;
  }
  return true;
}

/// Supported on one parity class and nonincreasing along that class's
/// canonical subsequence.
template <class S>
bool is_half_greedily_arranged(const Distribution<S>& p) {
  const auto& atoms = p.atoms();
  if (atoms.empty()) return true;
  const auto& params = p.params();
  const int par = parity(atoms.front().vertex, params);
  // Canonical order restricted to a parity class preserves index order.
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (parity(atoms[i].vertex, params) != par) return false;
    if (parity_rank(atoms[i].vertex, params) != i) return false;
    if (i > 0 && !ScalarTraits<S>::leq(atoms[i].weight, atoms[i - 1].weight)) return false;
  }
  return true;
}

namespace detail {

// p'(v) = self * p(v) + neighbor * sum_{u in N'(v)} p(u).
template <class S>
Distribution<S> walk_step(const Distribution<S>& p, const S& self, const S& neighbor) {
  const auto& params = p.params();
  const auto& atoms = p.atoms();
  for (const auto& a : atoms)
    if (depth(a.vertex, params) >= params.depth_cap())
      throw BoundaryOverflow("support reaches depth cap " + std::to_string(params.depth_cap()) +
                             "; a step would leave the truncated tree");

  // (target, source atom) pairs, one per edge leaving the support.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> edges;
  edges.reserve(atoms.size() * static_cast<std::size_t>(params.d()));
  for (std::uint32_t i = 0; i < atoms.size(); ++i)
    for (auto u : neighbors_open(atoms[i].vertex, params)) edges.emplace_back(u.index, i);
  std::sort(edges.begin(), edges.end());

  const bool lazy = !(self == S(0));
  std::vector<Atom<S>> out;
  out.reserve(edges.size() / 2 + atoms.size());
  std::size_t e = 0, s = 0;
  while (e < edges.size() || (lazy && s < atoms.size())) {
    const std::uint64_t next_edge = e < edges.size() ? edges[e].first : UINT64_MAX;
    const std::uint64_t next_self = lazy && s < atoms.size() ? atoms[s].vertex.index : UINT64_MAX;
    const std::uint64_t v = std::min(next_edge, next_self);
    S w{0};
    if (e < edges.size() && edges[e].first == v) {
      S incoming{0};
      for (; e < edges.size() && edges[e].first == v; ++e) incoming += atoms[edges[e].second].weight;
      w = neighbor * incoming;
    }
    if (lazy && s < atoms.size() && atoms[s].vertex.index == v) {
      w += self * atoms[s].weight;
      ++s;
    }
    if (!(w == S(0))) out.push_back({VertexId{v}, std::move(w)});
  }
  return Distribution<S>(params, std::move(out), typename Distribution<S>::Trusted{});
}

} // namespace detail

/// One lazy step staying put with probability gamma in [1/(d+1), 1).
template <class S>
Distribution<S> lazy_step(const Distribution<S>& p, const S& gamma) {
  const auto d = p.params().d();
  if (gamma < S(1) / S(d + 1) || !(gamma < S(1)))
    throw std::invalid_argument("laziness must lie in [1/(d+1), 1)");
  return detail::walk_step(p, gamma, S((S(1) - gamma) / S(d)));
}

/// One step of the simple (non-lazy) walk.
template <class S>
Distribution<S> simple_step(const Distribution<S>& p) {
  return detail::walk_step(p, S(0), S(S(1) / S(p.params().d())));
}

template <class S>
Distribution<S> walk_step(const Distribution<S>& p, WalkMode mode, const S& gamma) {
  return mode == WalkMode::lazy ? lazy_step(p, gamma) : simple_step(p);
}

/// p'(pi(v)) = p(v). Throws NotInjective if pi collides on the support.
template <class S>
Distribution<S> permute(const Distribution<S>& p, const PermutationSpec& pi) {
  if (std::holds_alternative<IdentityPerm>(pi)) return p;
  std::vector<Atom<S>> out;
  out.reserve(p.support_size());
  for (const auto& a : p.atoms()) out.push_back({apply(pi, a.vertex, p.params()), a.weight});
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.vertex < y.vertex; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].vertex == out[i - 1].vertex)
      throw NotInjective(std::string(kind_name(pi)) + " permutation maps two support vertices to " +
                         std::to_string(out[i].vertex.index));
  return Distribution<S>(p.params(), std::move(out), typename Distribution<S>::Trusted{});
}

/// Law of the depth: entry n is Pr[|X| = n].
template <class S>
std::vector<S> depth_pmf(const Distribution<S>& p) {
  std::vector<S> pmf;
  for (const auto& a : p.atoms()) {
    const auto n = static_cast<std::size_t>(depth(a.vertex, p.params()));
    if (pmf.size() <= n) pmf.resize(n + 1, S(0));
    pmf[n] += a.weight;
  }
  return pmf;
}

/// Pr_q[depth + shift >= n] >= Pr_p[depth >= n] for all n.
template <class S>
bool depth_cdf_dominates(const Distribution<S>& p, const Distribution<S>& q, int shift) {
  const auto pp = depth_pmf(p);
  const auto qq = depth_pmf(q);
  const auto tail = [](const std::vector<S>& pmf) {
    std::vector<S> t(pmf.size() + 1, S(0));
    for (std::size_t n = pmf.size(); n-- > 0;) t[n] = t[n + 1] + pmf[n];
    return t;
  };
  const auto tp = tail(pp);
  const auto tq = tail(qq);
  const auto q_tail = [&](std::int64_t n) -> S {
    if (n <= 0) return tq.front();
    return static_cast<std::size_t>(n) < tq.size() ? tq[static_cast<std::size_t>(n)] : S(0);
  };
  for (std::size_t n = 0; n < tp.size(); ++n)
    if (!ScalarTraits<S>::leq(tp[n], q_tail(static_cast<std::int64_t>(n) - shift))) return false;
  return true;
}

/// Shannon entropy in bits. Atoms are summed in decreasing order, so two
/// distributions with the same rearrangement get bit-identical results.
template <class S>
double shannon_entropy(const Distribution<S>& p) {
  std::vector<double> w;
  w.reserve(p.support_size());
  for (const auto& a : p.atoms()) w.push_back(ScalarTraits<S>::to_double(a.weight));
  std::sort(w.begin(), w.end(), std::greater<>());
  double h = 0.0;
  for (double x : w)
    if (x > 0.0) h -= x * std::log2(x);
  return h;
}

template <class S>
Distribution<double> to_float(const Distribution<S>& p) {
  std::vector<Atom<double>> atoms;
  atoms.reserve(p.support_size());
  for (const auto& a : p.atoms()) atoms.push_back({a.vertex, ScalarTraits<S>::to_double(a.weight)});
  return Distribution<double>(p.params(), std::move(atoms), Distribution<double>::Trusted{});
}

} // namespace permwalk
