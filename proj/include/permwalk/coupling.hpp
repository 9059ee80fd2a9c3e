#pragma once

// Couplings of two nearest-neighbor walks on Z that keep the second one
// ahead: a joint law of two Binomial(n, p) variables, the bridge coupling of
// paths with ordered endpoints, the dyadic epoch coupling built from both,
// its composition with the automorphism coupling on T_d, and the
// exceptional-time experiment for translations of Z.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "permwalk/rng.hpp"
#include "permwalk/scalar.hpp"
#include "permwalk/schedule.hpp"
#include "permwalk/walks.hpp"

namespace permwalk {

/// Closed integer interval; empty when hi < lo.
struct IntInterval {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  bool empty() const { return hi < lo; }
  bool contains(std::int64_t i) const { return lo <= i && i <= hi; }
  std::int64_t size() const { return empty() ? 0 : hi - lo + 1; }
  friend bool operator==(const IntInterval&, const IntInterval&) = default;
};

/// max(1, floor(sqrt(n) / (ln n)^2)); n = 1 gives 1.
inline std::int64_t default_shift(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("binomial coupling needs n >= 1");
  if (n == 1) return 1;
  const long double ln = std::log(static_cast<long double>(n));
  const auto m = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<long double>(n)) / (ln * ln)));
  return std::max<std::int64_t>(1, m);
}

/// I = [pn - sqrt(n), pn] and J = [pn - sqrt(n), pn - m], intersected with
/// [0, n]. Membership is decided in integers: i >= pn - sqrt(n) iff
/// x = n num - i den satisfies x <= 0 or x^2 <= den^2 n.
inline std::pair<IntInterval, IntInterval> coupling_intervals(std::int64_t n, const Rational& p, std::int64_t m) {
  const mpz_class num = p.get_num(), den = p.get_den();
  const mpz_class nn = n;
  const auto above_lower = [&](std::int64_t i) {
    const mpz_class x = nn * num - mpz_class(i) * den;
    return x <= 0 || x * x <= den * den * nn;
  };
  mpz_class top;
  mpz_fdiv_q(top.get_mpz_t(), mpz_class(nn * num).get_mpz_t(), den.get_mpz_t());
  IntInterval I;
  I.hi = std::min<std::int64_t>(top.get_si(), n);
  I.lo = I.hi + 1;
  while (I.lo - 1 >= 0 && above_lower(I.lo - 1)) --I.lo;
  if (I.lo > I.hi) I = IntInterval{};
  IntInterval J;
  mpz_class jtop;
  mpz_fdiv_q(jtop.get_mpz_t(), mpz_class(nn * num - mpz_class(m) * den).get_mpz_t(), den.get_mpz_t());
  if (!I.empty()) {
    J.lo = I.lo;
    J.hi = std::min<std::int64_t>(jtop.get_si(), I.hi);
    if (J.hi < J.lo) J = IntInterval{};
  }
  return {I, J};
}

namespace detail {

inline std::vector<Rational> binomial_pmf_exact(std::int64_t n, const Rational& p) {
  std::vector<Rational> f(static_cast<std::size_t>(n) + 1);
  const Rational q = 1 - p;
  mpz_class c = 1;
  for (std::int64_t i = 0; i <= n; ++i) {
    mpq_class pi, qi;
    mpz_class pn, pd, qn, qd;
    mpz_pow_ui(pn.get_mpz_t(), p.get_num_mpz_t(), static_cast<unsigned long>(i));
    mpz_pow_ui(pd.get_mpz_t(), p.get_den_mpz_t(), static_cast<unsigned long>(i));
    mpz_pow_ui(qn.get_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(n - i));
    mpz_pow_ui(qd.get_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(n - i));
    Rational w(c * pn * qn, pd * qd);
    w.canonicalize();
    f[static_cast<std::size_t>(i)] = w;
    c = c * (n - i) / (i + 1);
  }
  return f;
}

inline std::vector<double> binomial_pmf_float(std::int64_t n, double p) {
  std::vector<double> f(static_cast<std::size_t>(n) + 1);
  const double lp = std::log(p), lq = std::log1p(-p);
  const double ln = std::lgamma(static_cast<double>(n) + 1);
  for (std::int64_t i = 0; i <= n; ++i) {
    const double k = static_cast<double>(i);
    f[static_cast<std::size_t>(i)] =
        std::exp(ln - std::lgamma(k + 1) - std::lgamma(static_cast<double>(n) - k + 1) + k * lp + (static_cast<double>(n) - k) * lq);
  }
  return f;
}

} // namespace detail

template <class S>
struct JointEntry {
  std::int64_t first;  // B
  std::int64_t second; // B'
  S weight;
};

/// Joint law of (B, B') with both marginals Binomial(n, p): B' = B off I,
/// B' = B + m on J, and on (I \ J) x I the northwest-corner (monotone)
/// transport of f restricted to I \ J onto the residual
/// g(j) = f(j) - [j - m in J] f(j - m).
template <class S>
class BinomialCoupling {
public:
  BinomialCoupling(std::int64_t n, const Rational& p, std::optional<std::int64_t> m = std::nullopt)
      : n_(n), p_(p), m_(m ? *m : default_shift(n)) {
    if (n < 1) throw std::invalid_argument("binomial coupling needs n >= 1");
    if (p <= 0 || p >= 1) throw std::invalid_argument("binomial coupling needs p in (0, 1)");
    if (m_ < 1) throw std::invalid_argument("shift m must be positive");
    std::tie(I_, J_) = coupling_intervals(n, p, m_);
    if constexpr (std::is_same_v<S, Rational>) {
      f_ = detail::binomial_pmf_exact(n, p);
    } else {
      f_ = detail::binomial_pmf_float(n, p.get_d());
    }
    build_block();
  }

  std::int64_t n() const { return n_; }
  const Rational& p() const { return p_; }
  std::int64_t m() const { return m_; }
  const IntInterval& I() const { return I_; }
  const IntInterval& J() const { return J_; }
  const std::vector<S>& pmf() const { return f_; }
  const std::vector<JointEntry<S>>& block() const { return block_; }

  /// Every atom of the joint law, ordered by (B, B').
  std::vector<JointEntry<S>> entries() const {
    std::vector<JointEntry<S>> out;
    std::size_t b = 0;
    for (std::int64_t i = 0; i <= n_; ++i) {
      const auto& w = f_[static_cast<std::size_t>(i)];
      if (J_.contains(i)) {
        out.push_back({i, i + m_, w});
      } else if (I_.contains(i)) {
        for (; b < block_.size() && block_[b].first == i; ++b) out.push_back(block_[b]);
      } else {
        out.push_back({i, i, w});
      }
    }
    return out;
  }

  std::vector<S> marginal_first() const { return marginal(true); }
  std::vector<S> marginal_second() const { return marginal(false); }

  S probability(bool (*event)(std::int64_t, std::int64_t)) const {
    S total{0};
    for (const auto& e : entries())
      if (event(e.first, e.second)) total += e.weight;
    return total;
  }

  S prob_second_below_first() const {
    return probability([](std::int64_t b, std::int64_t bp) { return bp < b; });
  }
  S prob_gap_at_least_m() const {
    S total{0};
    for (const auto& e : entries())
      if (e.second - e.first >= m_) total += e.weight;
    return total;
  }
  S prob_first_in_J() const {
    S total{0};
    for (std::int64_t i = J_.lo; i <= J_.hi; ++i) total += f_[static_cast<std::size_t>(i)];
    return total;
  }

  /// B' given B = b.
  std::int64_t sample_second(std::int64_t b, Engine& rng) const {
    if (J_.contains(b)) return b + m_;
    if (!I_.contains(b)) return b;
    const auto range = std::equal_range(block_.begin(), block_.end(), b,
                                        Cmp{});
    double total = 0;
    for (auto it = range.first; it != range.second; ++it) total += ScalarTraits<S>::to_double(it->weight);
    double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    for (auto it = range.first; it != range.second; ++it) {
      u -= ScalarTraits<S>::to_double(it->weight);
      if (u < 0) return it->second;
    }
    return std::prev(range.second)->second;
  }

private:
  struct Cmp {
    bool operator()(const JointEntry<S>& e, std::int64_t b) const { return e.first < b; }
    bool operator()(std::int64_t b, const JointEntry<S>& e) const { return b < e.first; }
  };

  std::vector<S> marginal(bool first) const {
    std::vector<S> out(static_cast<std::size_t>(n_) + 1, S(0));
    for (const auto& e : entries()) out[static_cast<std::size_t>(first ? e.first : e.second)] += e.weight;
    return out;
  }

  void build_block() {
    if (I_.empty()) return;
    // Residual second marginal on I.
    std::vector<S> g;
    for (std::int64_t j = I_.lo; j <= I_.hi; ++j) {
      S r = f_[static_cast<std::size_t>(j)];
      if (J_.contains(j - m_)) r -= f_[static_cast<std::size_t>(j - m_)];
      if (r < S(0)) {
        if constexpr (std::is_same_v<S, double>) {
          if (r > -1e-15) r = 0;
        }
        if (r < S(0))
          throw std::logic_error("binomial coupling completion infeasible: f(j - m) > f(j) at j = " + std::to_string(j));
      }
      g.push_back(r);
    }
    std::size_t target = 0;
    S left_target = g.empty() ? S(0) : g[0];
    for (std::int64_t i = I_.lo; i <= I_.hi; ++i) {
      if (J_.contains(i)) continue;
      S left = f_[static_cast<std::size_t>(i)];
      while (left > S(0) && target < g.size()) {
        if (left_target <= S(0)) {
          if (++target < g.size()) left_target = g[target];
          continue;
        }
        const S moved = std::min(left, left_target);
        block_.push_back({i, I_.lo + static_cast<std::int64_t>(target), moved});
        left -= moved;
        left_target -= moved;
      }
      if constexpr (std::is_same_v<S, Rational>) {
        if (left != 0) throw std::logic_error("binomial coupling transport left mass unassigned");
      }
    }
  }

  std::int64_t n_;
  Rational p_;
  std::int64_t m_;
  IntInterval I_, J_;
  std::vector<S> f_;
  std::vector<JointEntry<S>> block_;
};

/// +1/-1 increments of a walk of length L from 0 to `end`, uniform among
/// all such arrangements.
inline std::vector<std::int8_t> uniform_bridge(std::int64_t end, std::int64_t length, Engine& rng) {
  if (length < 0 || end > length || end < -length || (length - end) % 2 != 0)
    throw std::invalid_argument("no walk of length " + std::to_string(length) + " ends at " + std::to_string(end));
  const auto ups = static_cast<std::size_t>((length + end) / 2);
  std::vector<std::int8_t> inc(static_cast<std::size_t>(length), -1);
  std::fill(inc.begin(), inc.begin() + static_cast<std::ptrdiff_t>(ups), std::int8_t{1});
  std::shuffle(inc.begin(), inc.end(), rng);
  return inc;
}

struct BridgePair {
  std::vector<std::int8_t> first;  // S
  std::vector<std::int8_t> second; // S'
};

/// S uniform with endpoint a; S' flips a uniform set of (b - a) / 2 of the
/// -1 increments of S, so S'_i >= S_i for every i and S' ends at b.
inline BridgePair bridge_coupling(std::int64_t a, std::int64_t b, std::int64_t length, Engine& rng) {
  if (b < a) throw std::invalid_argument("bridge coupling needs b >= a");
  if ((b - a) % 2 != 0) throw std::invalid_argument("bridge endpoints differ by an odd amount");
  if (b > length) throw std::invalid_argument("endpoint b exceeds the walk length");
  BridgePair out;
  out.first = uniform_bridge(a, length, rng);
  out.second = out.first;
  std::vector<std::size_t> downs;
  for (std::size_t i = 0; i < out.first.size(); ++i)
    if (out.first[i] < 0) downs.push_back(i);
  const auto flips = static_cast<std::size_t>((b - a) / 2);
  // Partial Fisher-Yates: the first `flips` entries become a uniform subset.
  for (std::size_t k = 0; k < flips; ++k) {
    const auto j = k + static_cast<std::size_t>(uniform_below(rng, downs.size() - k));
    std::swap(downs[k], downs[j]);
    out.second[downs[k]] = 1;
  }
  return out;
}

/// Per-n cache of float-mode couplings used for sampling.
class BinomialCouplingCache {
public:
  explicit BinomialCouplingCache(Rational p) : p_(std::move(p)) {}
  const BinomialCoupling<double>& get(std::int64_t n) {
    auto it = cache_.find(n);
    if (it == cache_.end()) it = cache_.emplace(n, std::make_unique<BinomialCoupling<double>>(n, p_)).first;
    return *it->second;
  }

private:
  Rational p_;
  std::map<std::int64_t, std::unique_ptr<BinomialCoupling<double>>> cache_;
};

/// Increment streams of two +-1 walks with up-probability p coupled over
/// the dyadic epochs (2^n, 2^{n+1}], n >= 1. Steps 1 and 2 are independent.
struct EpochIncrements {
  std::vector<std::int8_t> first;
  std::vector<std::int8_t> second;
  std::vector<std::int64_t> epoch_gain; // (Delta'_n - Delta_n) for n = 1, 2, ...
};

inline EpochIncrements epoch_increments(const Rational& p, std::int64_t steps, Engine& rng) {
  EpochIncrements out;
  out.first.reserve(static_cast<std::size_t>(steps));
  out.second.reserve(static_cast<std::size_t>(steps));
  const RationalCoin up(p);
  for (std::int64_t t = 1; t <= std::min<std::int64_t>(2, steps); ++t) {
    out.first.push_back(up(rng) ? 1 : -1);
    out.second.push_back(up(rng) ? 1 : -1);
  }
  BinomialCouplingCache cache(p);
  const double pd = p.get_d();
  for (std::int64_t len = 2; static_cast<std::int64_t>(out.first.size()) < steps; len *= 2) {
    const auto& coupling = cache.get(len);
    const auto b = std::binomial_distribution<std::int64_t>(len, pd)(rng);
    const auto bp = coupling.sample_second(b, rng);
    const auto a = 2 * b - len, e = 2 * bp - len;
    BridgePair pair;
    if (bp >= b) {
      pair = bridge_coupling(a, e, len, rng);
    } else {
      pair.first = uniform_bridge(a, len, rng);
      pair.second = uniform_bridge(e, len, rng);
    }
    out.epoch_gain.push_back(e - a);
    for (std::size_t i = 0; i < pair.first.size() && static_cast<std::int64_t>(out.first.size()) < steps; ++i) {
      out.first.push_back(pair.first[i]);
      out.second.push_back(pair.second[i]);
    }
  }
  return out;
}

/// sqrt(t) / (ln t)^C for t >= 2, NaN below.
inline double slow_threshold(std::int64_t t, double exponent) {
  if (t < 2) return std::nan("");
  const double tt = static_cast<double>(t);
  return std::sqrt(tt) / std::pow(std::log(tt), exponent);
}

struct EpochCoupling {
  std::vector<std::int64_t> x;  // X_0..X_T
  std::vector<std::int64_t> xp; // X'_0..X'_T
  std::vector<std::int64_t> epoch_gain;
  CouplingReport report;
};

/// Two +-1 walks with up-probability p, X' kept ahead of X. The report
/// tracks X'_t - X_t against sqrt(t) / (ln t)^C.
inline EpochCoupling epoch_coupling(const Rational& p, std::int64_t horizon, std::uint64_t seed,
                                    std::uint64_t replicate = 0, double C = 4.0) {
  if (horizon < 2) throw std::invalid_argument("epoch coupling needs T >= 2");
  if (p <= 0 || p >= 1) throw std::invalid_argument("epoch coupling needs p in (0, 1)");
  Engine rng = make_engine(seed, replicate);
  auto inc = epoch_increments(p, horizon, rng);
  EpochCoupling out;
  out.x.assign(1, 0);
  out.xp.assign(1, 0);
  for (std::int64_t t = 0; t < horizon; ++t) {
    out.x.push_back(out.x.back() + inc.first[static_cast<std::size_t>(t)]);
    out.xp.push_back(out.xp.back() + inc.second[static_cast<std::size_t>(t)]);
  }
  out.epoch_gain = std::move(inc.epoch_gain);
  auto& r = out.report;
  r.kind = "epochs";
  r.horizon = horizon;
  r.seed = derive_seed(seed, replicate);
  r.gap_definition = "X'_t - X_t";
  r.threshold_definition = "sqrt(t) / (ln t)^" + std::to_string(C);
  r.gap.resize(static_cast<std::size_t>(horizon) + 1);
  r.threshold.resize(static_cast<std::size_t>(horizon) + 1);
  for (std::int64_t t = 0; t <= horizon; ++t) {
    const auto i = static_cast<std::size_t>(t);
    r.gap[i] = out.xp[i] - out.x[i];
    r.threshold[i] = slow_threshold(t, C);
  }
  detail::score(r, false);
  return out;
}

struct SlowdownComposition {
  std::vector<int> depth_x; // |X_t|
  std::vector<int> depth_y; // |Y_t|
  CouplingReport report;
};

/// Lazy walk X on T_d (d > 2) against the permuted walk Y. Both depth
/// chains share their lazy times; their moves are driven by epoch-coupled
/// +-1 walks with p = (d - 1)/d, reflected at the root. The ahead chain is
/// lifted to a tree walk X' by uniform child choices and Y_t = Pi_t X'_t.
/// The report tracks |Y_t| - |X_t| against sqrt(t) / (ln t)^(2C).
inline SlowdownComposition slowdown_composition(const Schedule& schedule, std::int64_t horizon, std::uint64_t seed,
                                                std::uint64_t replicate = 0, double C = 4.0) {
  const int d = schedule.d;
  if (d <= 2) throw std::invalid_argument("slowdown composition needs d > 2");
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  for (std::size_t t = 1; t <= schedule.permutations.size(); ++t)
    if (!is_automorphism_kind(schedule.at(t)))
      throw std::invalid_argument(std::string("slowdown composition needs automorphisms; pi_") + std::to_string(t) +
                                  " is " + kind_name(schedule.at(t)));
  Engine rng = make_engine(seed, replicate);
  // Shared lazy times first, then the number of moves fixes the epoch stream.
  std::vector<bool> moves(static_cast<std::size_t>(horizon) + 1, false);
  std::int64_t move_count = 0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    moves[static_cast<std::size_t>(t)] = uniform_below(rng, static_cast<std::uint64_t>(d + 1)) != 0;
    move_count += moves[static_cast<std::size_t>(t)];
  }
  const Rational p(d - 1, d);
  const auto inc = epoch_increments(p, std::max<std::int64_t>(move_count, 2), rng);

  std::vector<std::pair<std::int64_t, const PermutationSpec*>> active;
  for (std::size_t t = 1; t <= schedule.permutations.size() && static_cast<std::int64_t>(t) <= horizon; ++t)
    if (!std::holds_alternative<IdentityPerm>(schedule.at(t))) active.emplace_back(static_cast<std::int64_t>(t), &schedule.at(t));

  SlowdownComposition out;
  out.depth_x.assign(1, 0);
  out.depth_y.assign(1, 0);
  int dx = 0;
  TreePath xp;
  std::size_t k = 0, applied = 0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    if (moves[static_cast<std::size_t>(t)]) {
      dx = dx == 0 ? 1 : dx + inc.first[k];
      const bool up = xp.is_root() || inc.second[k] > 0;
      if (!up) {
        xp.to_parent();
      } else if (xp.is_root()) {
        xp.to_child(static_cast<std::uint32_t>(uniform_below(rng, static_cast<std::uint64_t>(d))));
      } else {
        xp.to_child(static_cast<std::uint32_t>(uniform_below(rng, static_cast<std::uint64_t>(d - 1))));
      }
      ++k;
    }
    while (applied < active.size() && active[applied].first <= t) ++applied;
    int dy = xp.depth();
    if (applied > 0) {
      TreePath y = xp;
      for (std::size_t s = 0; s < applied; ++s) apply(*active[s].second, y, d);
      dy = y.depth();
    }
    out.depth_x.push_back(dx);
    out.depth_y.push_back(dy);
  }

  auto& r = out.report;
  r.kind = "slowdown";
  r.horizon = horizon;
  r.seed = derive_seed(seed, replicate);
  r.gap_definition = "|Y_t| - |X_t|";
  r.threshold_definition = "sqrt(t) / (ln t)^" + std::to_string(2 * C);
  r.gap.resize(static_cast<std::size_t>(horizon) + 1);
  r.threshold.resize(static_cast<std::size_t>(horizon) + 1);
  for (std::int64_t t = 0; t <= horizon; ++t) {
    const auto i = static_cast<std::size_t>(t);
    r.gap[i] = out.depth_y[i] - out.depth_x[i];
    r.threshold[i] = slow_threshold(t, 2 * C);
  }
  detail::score(r, false);
  return out;
}

struct ExceptionalExperiment {
  std::vector<std::int64_t> x;     // X_t on Z
  std::vector<std::int64_t> y;     // Y_t = X_t - ell_t
  std::vector<std::int64_t> phi;   // phi(t), t >= 1
  std::vector<double> running_max; // max_{s <= t} (|X_s| - |Y_s|) / phi(s)
  double max_phi_ratio = 0;        // final running max
  double max_lil_ratio = 0;        // max (|X_t| - |Y_t|) / sqrt(t L(t)) over t >= 16
  std::int64_t consistency_failures = 0; // t with |Y_t + ell_t| != |X_t|
  CouplingReport report;
};

/// Lazy walk on Z (stay 1/3) and the walk permuted by the exceptional
/// translation schedule, coupled by shared increments.
inline ExceptionalExperiment exceptional_time_experiment(std::int64_t horizon, std::uint64_t seed,
                                                         std::uint64_t replicate = 0, GrowthFunction f = {}) {
  const auto schedule = build_exceptional_schedule(horizon, f);
  Engine rng = make_engine(seed, replicate);
  ExceptionalExperiment out;
  const auto n = static_cast<std::size_t>(horizon) + 1;
  out.x.assign(n, 0);
  out.y.assign(n, 0);
  out.phi.assign(n, 0);
  out.running_max.assign(n, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  double best_lil = -std::numeric_limits<double>::infinity();
  std::int64_t x = 0, y = 0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const auto k = uniform_below(rng, 3);
    const std::int64_t step = k == 0 ? 0 : (k == 1 ? 1 : -1);
    x += step;
    // Y_t = pi_t(Y_{t-1} + step), pi_t a translation by ell_{t-1} - ell_t.
    y = y + step + schedule.translation_at(t).offset;
    const auto i = static_cast<std::size_t>(t);
    out.x[i] = x;
    out.y[i] = y;
    if (std::llabs(y + schedule.ell[i]) != std::llabs(x)) ++out.consistency_failures;
    const auto ph = phi(t);
    out.phi[i] = ph;
    const auto gap = std::llabs(x) - std::llabs(y);
    best = std::max(best, static_cast<double>(gap) / static_cast<double>(ph));
    out.running_max[i] = best;
    if (t >= 16) {
      const double tt = static_cast<double>(t);
      best_lil = std::max(best_lil, static_cast<double>(gap) / std::sqrt(tt * std::log(std::log(tt))));
    }
  }
  out.max_phi_ratio = horizon >= 1 ? best : 0.0;
  out.max_lil_ratio = horizon >= 16 ? best_lil : 0.0;

  auto& r = out.report;
  r.kind = "exceptional";
  r.horizon = horizon;
  r.seed = derive_seed(seed, replicate);
  r.gap_definition = "|X_t| - |Y_t|";
  r.threshold_definition = "phi(t)";
  r.gap.resize(n);
  r.threshold.resize(n);
  r.threshold[0] = std::nan("");
  for (std::size_t i = 0; i < n; ++i) {
    r.gap[i] = std::llabs(out.x[i]) - std::llabs(out.y[i]);
    if (i > 0) r.threshold[i] = static_cast<double>(out.phi[i]);
  }
  detail::score(r, true);
  r.notes.push_back("violations count times with |X_t| - |Y_t| > phi(t)");
  if (out.consistency_failures != 0)
    r.notes.push_back(std::to_string(out.consistency_failures) + " times with |Y_t + ell_t| != |X_t|");
  return out;
}

} // namespace permwalk
