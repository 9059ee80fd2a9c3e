// permwalk-cli: verification suites, simulations and couplings.
//
// Exit codes: 0 all checks pass, 1 a mathematical violation was found,
// 2 configuration, IO or budget error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "permwalk/coupling.hpp"
#include "permwalk/io.hpp"
#include "permwalk/iso_suite.hpp"
#include "permwalk/verify.hpp"
#include "permwalk/walks.hpp"

using namespace permwalk;

namespace {

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

// Primary output goes to --out (or stdout); timestamps go to a sidecar
// <out>.meta.json so reruns produce byte-identical primary files.
struct Run {
  std::string command;
  std::string out;
  std::string csv;
  unsigned workers = 1;
  std::vector<std::string> argv;
  std::string started = utc_now();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void emit(const std::string& text) const {
    if (out.empty()) {
      std::cout << text;
    } else {
      write_file(out, text);
      Json meta;
      meta["command"] = command;
      meta["argv"] = argv;
      meta["started_utc"] = started;
      meta["finished_utc"] = utc_now();
      meta["elapsed_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      meta["workers"] = workers;
      write_file(out + ".meta.json", meta.dump(2) + "\n");
    }
  }
};

Rational rational_option(const std::string& text, const char* name) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--") + name + ": " + e.what());
  }
}

WalkMode mode_option(const std::string& text) {
  if (text == "lazy") return WalkMode::lazy;
  if (text == "simple") return WalkMode::simple;
  throw ConfigError("--mode must be lazy or simple");
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed) {
  if (!seed) throw ConfigError("this command draws random numbers; pass --seed");
  return *seed;
}

Json step_json(const StepCheck& c) {
  return Json{{"t", c.t},
              {"majorizes", c.majorizes},
              {"arranged", c.arranged},
              {"depth_dominates", c.depth_dominates},
              {"depth_dominates_unshifted", c.depth_dominates_unshifted},
              {"entropy_p", c.entropy_p},
              {"entropy_q", c.entropy_q},
              {"entropy_ordered", c.entropy_ordered},
              {"support_p", c.support_p},
              {"support_q", c.support_q}};
}

Json chain_json(const MajorizationReport& r, bool steps) {
  Json j;
  j["passed"] = r.passed();
  j["first_violation"] = r.first_violation ? Json{{"t", r.first_violation->t}, {"check", r.first_violation->check}} : Json(nullptr);
  j["notes"] = r.notes;
  if (steps) {
    j["steps"] = Json::array();
    for (const auto& c : r.steps) j["steps"].push_back(step_json(c));
  }
  return j;
}

template <class S>
MajorizationReport run_chain(const Schedule& s, int T, const Rational& gamma, WalkMode mode) {
  const TreeParams params(s.d, required_depth_cap(s, T));
  return verify_majorization_chain<S>(s, params, T, convert_rational<S>(gamma), mode);
}

// ---------------------------------------------------------------- verify-iso

struct IsoArgs {
  int d = 3;
  int depth = 2;
  std::uint64_t budget = IsoSuiteOptions{}.budget;
};

int cmd_verify_iso(const IsoArgs& a, const Run& run) {
  IsoSuiteOptions opt;
  opt.budget = a.budget;
  const auto r = run_iso_suite(a.d, a.depth, opt);
  Json j;
  j["command"] = "verify-iso";
  j["d"] = r.d;
  j["ball_depth"] = r.ball_depth;
  j["subsets"] = r.subsets;
  j["iso_exact_violations"] = r.iso_exact_violations;
  j["lower_bound_violations"] = r.lower_bound_violations;
  j["lazy_dominance_violations"] = r.lazy_dominance_violations;
  j["simple_dominance_violations"] = r.simple_dominance_violations;
  j["listed"] = r.listed;
  j["passed"] = r.violations() == 0;
  run.emit(j.dump(2) + "\n");
  return r.violations() == 0 ? kPass : kViolation;
}

// ------------------------------------------------------- verify-majorization

struct MajArgs {
  std::string schedule;
  int random = 0;
  int d = 3;
  int radius = 4;
  int T = 8;
  std::string gamma;
  std::string mode = "lazy";
  std::string arith = "rational";
  std::optional<std::uint64_t> seed;
  bool joint = false;
  bool steps = false;
};

Json joint_json(const Schedule& s) {
  if (s.permutations.size() > 3) throw ConfigError("--joint looks at |W_2| + |W_3| and uses pi_1..pi_3 only");
  Schedule plain;
  plain.d = s.d;
  auto sum23 = [](std::span<const int> dep) { return std::int64_t{dep[1]} + dep[2]; };
  auto at_most_two = [&](const Schedule& sc) {
    Rational total = 0;
    for (const auto& [v, pr] : enumerate_joint(sc, 3, sum23))
      if (v <= 2) total += pr;
    return total;
  };
  const auto px = at_most_two(plain), py = at_most_two(s);
  return Json{{"statistic", "Pr[|W_2| + |W_3| <= 2], laziness 1/(d+1)"},
              {"plain", px.get_str()},
              {"permuted", py.get_str()},
              {"plain_float", px.get_d()},
              {"permuted_float", py.get_d()},
              {"permuted_exceeds_plain", py > px}};
}

int cmd_verify_majorization(const MajArgs& a, const Run& run) {
  const WalkMode mode = mode_option(a.mode);
  if (a.arith != "rational" && a.arith != "float") throw ConfigError("--arith must be rational or float");
  if (a.T < 0) throw ConfigError("--T must be nonnegative");
  if (a.schedule.empty() == (a.random == 0)) throw ConfigError("pass exactly one of --schedule FILE or --random N");

  std::vector<Schedule> schedules;
  if (!a.schedule.empty()) {
    schedules.push_back(load_schedule(a.schedule));
  } else {
    const auto seed = require_seed(a.seed);
    if (a.radius < 0) throw ConfigError("--radius must be nonnegative");
    schedules = run_replicates(static_cast<std::size_t>(a.random), run.workers, [&](std::size_t r) {
      Engine rng = make_engine(seed, r);
      return random_bijection_schedule(a.d, a.radius, a.T, rng);
    });
  }
  const int d = schedules.front().d;
  const Rational gamma = a.gamma.empty() ? (mode == WalkMode::lazy ? Rational(1, d + 1) : Rational(0)) : rational_option(a.gamma, "gamma");
  if (mode == WalkMode::lazy && (gamma < Rational(1, d + 1) || gamma >= 1))
    throw ConfigError("--gamma must lie in [1/(d+1), 1) for the lazy walk");

  const auto reports = run_replicates(schedules.size(), run.workers, [&](std::size_t i) {
    return a.arith == "rational" ? run_chain<Rational>(schedules[i], a.T, gamma, mode)
                                 : run_chain<double>(schedules[i], a.T, gamma, mode);
  });

  std::size_t failed = 0;
  Json j;
  j["command"] = "verify-majorization";
  j["d"] = d;
  j["T"] = a.T;
  j["gamma"] = gamma.get_str();
  j["mode"] = to_string(mode);
  j["arith"] = a.arith;
  j["schedules"] = Json::array();
  for (const auto& r : reports) {
    failed += !r.passed();
    j["schedules"].push_back(chain_json(r, a.steps));
  }
  j["failed"] = failed;
  if (a.joint) {
    if (schedules.size() != 1) throw ConfigError("--joint needs a single --schedule");
    j["joint"] = joint_json(schedules.front());
  }
  j["passed"] = failed == 0;
  run.emit(j.dump(2) + "\n");
  return failed == 0 ? kPass : kViolation;
}

// ------------------------------------------------------------------ simulate

struct SimArgs {
  std::string kind = "lazy";
  int d = 3;
  std::string gamma;
  std::int64_t T = 1000;
  std::optional<std::uint64_t> seed;
  std::string schedule;
  int replicates = 1;
};

int cmd_simulate(const SimArgs& a, const Run& run) {
  const auto seed = require_seed(a.seed);
  std::optional<Schedule> schedule;
  if (!a.schedule.empty()) schedule = load_schedule(a.schedule);
  SimulationConfig cfg;
  cfg.kind = mode_option(a.kind);
  cfg.d = schedule ? schedule->d : a.d;
  cfg.gamma = a.gamma.empty() ? Rational(0) : rational_option(a.gamma, "gamma");
  cfg.horizon = a.T;
  cfg.seed = seed;
  cfg.schedule = schedule ? &*schedule : nullptr;
  cfg.schedule_id = a.schedule;
  if (a.replicates < 1) throw ConfigError("--replicates must be positive");

  std::ostringstream out;
  if (a.replicates == 1) {
    const auto trace = simulate(cfg);
    TraceTable table;
    table.depth_x.assign(trace.depths.begin(), trace.depths.end());
    write_trace_csv(out, table);
    std::cerr << "final speed " << format_double(trace.speed()) << "\n";
  } else {
    const auto speeds = run_replicates(static_cast<std::size_t>(a.replicates), run.workers, [&](std::size_t r) {
      auto c = cfg;
      c.replicate = r;
      const auto trace = simulate(c);
      return std::pair{trace.depths.back(), trace.speed()};
    });
    out << "replicate,final_depth,speed\n";
    double total = 0;
    for (std::size_t r = 0; r < speeds.size(); ++r) {
      out << r << ',' << speeds[r].first << ',' << format_double(speeds[r].second) << '\n';
      total += speeds[r].second;
    }
    std::cerr << "mean speed " << format_double(total / static_cast<double>(speeds.size())) << "\n";
  }
  run.emit(out.str());
  return kPass;
}

// -------------------------------------------------------------------- couple

struct CoupleArgs {
  std::string mode = "epochs";
  std::string schedule;
  int d = 3;
  std::string p = "2/3";
  std::int64_t T = 1 << 14;
  std::optional<std::uint64_t> seed;
  double C = 4.0;
  int replicates = 1;
  bool series = false;
};

int cmd_couple(const CoupleArgs& a, const Run& run) {
  const auto seed = require_seed(a.seed);
  if (a.replicates < 1) throw ConfigError("--replicates must be positive");
  Schedule schedule;
  schedule.d = a.d;
  if (!a.schedule.empty()) schedule = load_schedule(a.schedule);
  const Rational p = rational_option(a.p, "p");
  if (a.mode != "automorphism" && a.mode != "epochs" && a.mode != "slowdown")
    throw ConfigError("--mode must be automorphism, epochs or slowdown");
  if ((a.mode == "automorphism" || a.mode == "slowdown")) {
    for (std::size_t t = 1; t <= schedule.permutations.size(); ++t)
      if (!is_automorphism_kind(schedule.at(t))) throw ConfigError("couplings need a schedule of automorphisms");
  }

  struct One {
    CouplingReport report;
    TraceTable table;
  };
  auto one = [&](std::size_t r) -> One {
    One o;
    if (a.mode == "automorphism") {
      auto c = automorphism_coupling(schedule, a.T, seed, r);
      o.table.depth_x.assign(c.x.depths.begin(), c.x.depths.end());
      o.table.depth_y = std::vector<std::int64_t>(c.y.depths.begin(), c.y.depths.end());
      o.report = std::move(c.report);
    } else if (a.mode == "epochs") {
      auto c = epoch_coupling(p, a.T, seed, r, a.C);
      o.table.depth_x = c.x;
      o.table.depth_y = c.xp;
      o.report = std::move(c.report);
      o.report.notes.push_back("depth_X and depth_Y columns hold X_t and X'_t on Z");
    } else {
      auto c = slowdown_composition(schedule, a.T, seed, r, a.C);
      o.table.depth_x.assign(c.depth_x.begin(), c.depth_x.end());
      o.table.depth_y = std::vector<std::int64_t>(c.depth_y.begin(), c.depth_y.end());
      o.report = std::move(c.report);
    }
    o.table.gap = o.report.gap;
    return o;
  };
  const auto results = run_replicates(static_cast<std::size_t>(a.replicates), run.workers, one);

  Json j;
  j["command"] = "couple";
  j["mode"] = a.mode;
  j["T"] = a.T;
  if (a.mode == "epochs") j["p"] = p.get_str();
  else j["d"] = schedule.d;
  j["C"] = a.C;
  j["reports"] = Json::array();
  std::int64_t settled_quarter = 0;
  for (const auto& o : results) {
    j["reports"].push_back(to_json(o.report, a.series));
    settled_quarter += o.report.settle_time() <= a.T / 4;
  }
  j["runs_settled_by_T_over_4"] = settled_quarter;
  run.emit(j.dump(2) + "\n");
  if (!run.csv.empty()) {
    std::ostringstream csv;
    write_trace_csv(csv, results.front().table);
    write_file(run.csv, csv.str());
  }
  return kPass;
}

// --------------------------------------------------------- exceptional-times

struct ExcArgs {
  std::int64_t T = 1000000;
  std::optional<std::uint64_t> seed;
  std::string f = "log2";
  double exponent = 0.5;
  int replicates = 1;
};

int cmd_exceptional(const ExcArgs& a, const Run& run) {
  const auto seed = require_seed(a.seed);
  if (a.T < 1) throw ConfigError("--T must be positive");
  if (a.replicates < 1) throw ConfigError("--replicates must be positive");
  GrowthFunction f;
  if (a.f == "power") {
    f.kind = GrowthFunction::Kind::power;
    f.exponent = a.exponent;
    if (!(a.exponent > 0 && a.exponent < 0.5)) throw ConfigError("--exponent must lie in (0, 1/2) so that f = o(phi)");
  } else if (a.f != "log2") {
    throw ConfigError("--f must be log2 or power");
  }
  const auto results = run_replicates(static_cast<std::size_t>(a.replicates), run.workers,
                                      [&](std::size_t r) { return exceptional_time_experiment(a.T, seed, r, f); });
  Json j;
  j["command"] = "exceptional-times";
  j["T"] = a.T;
  j["f"] = a.f;
  j["runs"] = Json::array();
  std::int64_t failures = 0, above_half = 0;
  for (const auto& e : results) {
    failures += e.consistency_failures;
    above_half += e.max_phi_ratio > 0.5;
    // phi(t) ~ sqrt((4/3) t L); the other normalization uses sqrt(3)/2 in place of sqrt(4/3).
    j["runs"].push_back(Json{{"seed", e.report.seed},
                             {"max_gap_over_phi", e.max_phi_ratio},
                             {"max_gap_over_sqrt_tL", e.max_lil_ratio},
                             {"max_gap_over_sqrt3_2_sqrt_tL", e.max_lil_ratio / (std::sqrt(3.0) / 2.0)},
                             {"consistency_failures", e.consistency_failures},
                             {"report", to_json(e.report)}});
  }
  j["runs_above_half"] = above_half;
  j["consistency_failures"] = failures;
  run.emit(j.dump(2) + "\n");
  if (!run.csv.empty()) {
    const auto& e = results.front();
    TraceTable table;
    for (std::size_t i = 0; i < e.x.size(); ++i) table.depth_x.push_back(std::llabs(e.x[i]));
    table.depth_y.emplace();
    for (auto y : e.y) table.depth_y->push_back(std::llabs(y));
    table.gap = e.report.gap;
    table.phi = e.phi;
    table.extra = e.running_max;
    table.extra_name = "running_max";
    std::ostringstream csv;
    write_trace_csv(csv, table);
    write_file(run.csv, csv.str());
  }
  return failures == 0 ? kPass : kViolation;
}

// ------------------------------------------------------------------- entropy

struct EntropyArgs {
  std::string schedule;
  int d = 3;
  int T = 8;
  std::string gamma;
  std::string mode = "lazy";
};

int cmd_entropy(const EntropyArgs& a, const Run& run) {
  const WalkMode mode = mode_option(a.mode);
  Schedule s;
  s.d = a.d;
  if (!a.schedule.empty()) s = load_schedule(a.schedule);
  const Rational gamma = a.gamma.empty() ? (mode == WalkMode::lazy ? Rational(1, s.d + 1) : Rational(0)) : rational_option(a.gamma, "gamma");
  const auto r = run_chain<Rational>(s, a.T, gamma, mode);
  std::ostringstream out;
  out << "t,H_p,H_q,support_p,support_q,majorizes\n";
  for (const auto& c : r.steps)
    out << c.t << ',' << format_double(c.entropy_p) << ',' << format_double(c.entropy_q) << ',' << c.support_p << ','
        << c.support_q << ',' << (c.majorizes ? 1 : 0) << '\n';
  run.emit(out.str());
  return r.passed() ? kPass : kViolation;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Permuted random walks on regular trees: exact checks, simulations and couplings"};
  app.require_subcommand(1);
  Run run;
  for (int i = 0; i < argc; ++i) run.argv.emplace_back(argv[i]);
  auto common = [&](CLI::App* sub, bool csv) {
    sub->add_option("--out", run.out, "primary output file (stdout when omitted); timestamps go to <out>.meta.json");
    sub->add_option("--workers", run.workers, "worker threads for replicates")->capture_default_str()->check(CLI::PositiveNumber);
    if (csv) sub->add_option("--csv", run.csv, "trace CSV of the first replicate");
  };

  IsoArgs iso;
  auto* s_iso = app.add_subcommand("verify-iso", "exhaustive isoperimetry and K-profile checks over all subsets of B_depth");
  s_iso->add_option("--d", iso.d, "tree degree")->capture_default_str()->check(CLI::Range(2, 16));
  s_iso->add_option("--depth", iso.depth, "ball radius")->capture_default_str()->check(CLI::NonNegativeNumber);
  s_iso->add_option("--budget", iso.budget, "maximum number of subsets")->capture_default_str();
  common(s_iso, false);

  MajArgs maj;
  auto* s_maj = app.add_subcommand("verify-majorization", "exact p_t versus q_t comparison chain");
  s_maj->add_option("--schedule", maj.schedule, "schedule JSON file");
  s_maj->add_option("--random", maj.random, "number of random bijection schedules")->capture_default_str()->check(CLI::NonNegativeNumber);
  s_maj->add_option("--d", maj.d, "degree for random schedules")->capture_default_str()->check(CLI::Range(2, 16));
  s_maj->add_option("--radius", maj.radius, "random bijections act on B_radius")->capture_default_str();
  s_maj->add_option("--T", maj.T, "horizon")->capture_default_str();
  s_maj->add_option("--gamma", maj.gamma, "laziness as p/q or decimal (default 1/(d+1); unused for simple)");
  s_maj->add_option("--mode", maj.mode, "lazy or simple")->capture_default_str();
  s_maj->add_option("--arith", maj.arith, "rational or float")->capture_default_str();
  s_maj->add_option("--seed", maj.seed, "master seed (required with --random)");
  s_maj->add_flag("--joint", maj.joint, "also compare Pr[|W_2| + |W_3| <= 2] for the schedule and the plain walk");
  s_maj->add_flag("--steps", maj.steps, "include per-time checks in the report");
  common(s_maj, false);

  SimArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Monte Carlo walk; CSV of depths (one replicate) or final speeds");
  s_sim->add_option("--kind", sim.kind, "lazy or simple")->capture_default_str();
  s_sim->add_option("--d", sim.d, "tree degree")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  s_sim->add_option("--gamma", sim.gamma, "laziness (default 1/(d+1))");
  s_sim->add_option("--T", sim.T, "horizon")->capture_default_str()->check(CLI::NonNegativeNumber);
  s_sim->add_option("--seed", sim.seed, "master seed (required)");
  s_sim->add_option("--schedule", sim.schedule, "schedule JSON for the permuted walk");
  s_sim->add_option("--replicates", sim.replicates, "number of replicates")->capture_default_str();
  common(s_sim, false);

  CoupleArgs cp;
  auto* s_cp = app.add_subcommand("couple", "automorphism, epoch or slowdown coupling; JSON report");
  s_cp->add_option("--mode", cp.mode, "automorphism, epochs or slowdown")->capture_default_str();
  s_cp->add_option("--schedule", cp.schedule, "automorphism schedule JSON (default identity)");
  s_cp->add_option("--d", cp.d, "degree when no schedule is given")->capture_default_str()->check(CLI::Range(2, 1 << 20));
  s_cp->add_option("--p", cp.p, "up-probability for epochs, p/q or decimal")->capture_default_str();
  s_cp->add_option("--T", cp.T, "horizon")->capture_default_str()->check(CLI::NonNegativeNumber);
  s_cp->add_option("--seed", cp.seed, "master seed (required)");
  s_cp->add_option("--C", cp.C, "threshold exponent constant")->capture_default_str();
  s_cp->add_option("--replicates", cp.replicates, "number of replicates")->capture_default_str();
  s_cp->add_flag("--series", cp.series, "include gap and threshold series in the report");
  common(s_cp, true);

  ExcArgs ex;
  auto* s_ex = app.add_subcommand("exceptional-times", "translation schedule on Z; running max of the gap over phi(t)");
  s_ex->add_option("--T", ex.T, "horizon")->capture_default_str();
  s_ex->add_option("--seed", ex.seed, "master seed (required)");
  s_ex->add_option("--f", ex.f, "epoch length function: log2 or power")->capture_default_str();
  s_ex->add_option("--exponent", ex.exponent, "exponent for --f power")->capture_default_str();
  s_ex->add_option("--replicates", ex.replicates, "number of replicates")->capture_default_str();
  common(s_ex, true);

  EntropyArgs en;
  auto* s_en = app.add_subcommand("entropy", "Shannon entropy of p_t and q_t, exact evolution");
  s_en->add_option("--schedule", en.schedule, "schedule JSON (default identity)");
  s_en->add_option("--d", en.d, "degree when no schedule is given")->capture_default_str()->check(CLI::Range(2, 16));
  s_en->add_option("--T", en.T, "horizon")->capture_default_str()->check(CLI::NonNegativeNumber);
  s_en->add_option("--gamma", en.gamma, "laziness (default 1/(d+1))");
  s_en->add_option("--mode", en.mode, "lazy or simple")->capture_default_str();
  common(s_en, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    run.command = app.get_subcommands().front()->get_name();
    if (s_iso->parsed()) return cmd_verify_iso(iso, run);
    if (s_maj->parsed()) return cmd_verify_majorization(maj, run);
    if (s_sim->parsed()) return cmd_simulate(sim, run);
    if (s_cp->parsed()) return cmd_couple(cp, run);
    if (s_ex->parsed()) return cmd_exceptional(ex, run);
    if (s_en->parsed()) return cmd_entropy(en, run);
  } catch (const BudgetExceeded& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const BoundaryOverflow& e) {
    std::cerr << "depth cap exceeded: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
