#pragma once

// JSON and CSV formats: schedule files, distributions as
// [index, num, den] / [index, float] rows, coupling reports and trace tables.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "permwalk/distribution.hpp"
#include "permwalk/schedule.hpp"
#include "permwalk/walks.hpp"

namespace permwalk {

using Json = nlohmann::ordered_json;

// Malformed input file or document.
class FormatError : public std::runtime_error {
public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

template <class T>
T get_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw FormatError(where + ": bad \"" + key + "\": " + e.what());
  }
}

// Rejects negative numbers, which get<std::uint64_t> would wrap.
inline std::uint64_t get_index(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned()) throw FormatError(where + ": expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

inline std::uint64_t index_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing \"" + key + "\"");
  return get_index(j.at(key), where + " \"" + key + "\"");
}

inline Json integer_json(const mpz_class& z) {
  if (z.fits_slong_p()) return Json(static_cast<std::int64_t>(z.get_si()));
  return Json(z.get_str());
}

inline mpz_class integer_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<std::int64_t>()));
  if (j.is_number_unsigned()) return mpz_class(std::to_string(j.get<std::uint64_t>()));
  if (j.is_string()) {
    try {
      return mpz_class(j.get<std::string>(), 10);
    } catch (const std::invalid_argument&) {
    }
  }
  throw FormatError(where + ": expected an integer");
}

} // namespace detail

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline Json to_json(const PermutationSpec& spec) {
  Json j;
  j["type"] = kind_name(spec);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ExplicitPerm>) {
          j["map"] = s.map;
        } else if constexpr (std::is_same_v<T, Transposition>) {
          j["u"] = s.u;
          j["w"] = s.w;
        } else if constexpr (std::is_same_v<T, EdgeShift>) {
          j["target"] = s.target;
        } else if constexpr (std::is_same_v<T, Translation>) {
          j["offset"] = s.offset;
        }
      },
      spec);
  return j;
}

inline PermutationSpec spec_from_json(const Json& j, const std::string& where) {
  const auto type = detail::get_field<std::string>(j, "type", where);
  if (type == "identity") return IdentityPerm{};
  if (type == "explicit") {
    if (!j.contains("map") || !j.at("map").is_array()) throw FormatError(where + ": missing \"map\"");
    ExplicitPerm perm;
    for (const auto& v : j.at("map")) perm.map.push_back(detail::get_index(v, where + " map"));
    return perm;
  }
  if (type == "transposition") return Transposition{detail::index_field(j, "u", where), detail::index_field(j, "w", where)};
  if (type == "edge_shift") return EdgeShift{detail::index_field(j, "target", where)};
  if (type == "translation") return Translation{detail::get_field<std::int64_t>(j, "offset", where)};
  throw FormatError(where + ": unknown permutation type \"" + type + "\"");
}

inline Json to_json(const Schedule& s) {
  Json j;
  j["d"] = s.d;
  j["depth"] = s.depth;
  j["permutations"] = Json::array();
  for (const auto& p : s.permutations) j["permutations"].push_back(to_json(p));
  return j;
}

inline Schedule schedule_from_json(const Json& j) {
  Schedule s;
  s.d = detail::get_field<int>(j, "d", "schedule");
  s.depth = detail::get_field<int>(j, "depth", "schedule");
  if (s.d < 2) throw FormatError("schedule: d must be at least 2");
  if (s.depth < 0) throw FormatError("schedule: depth must be nonnegative");
  if (!j.contains("permutations")) throw FormatError("schedule: missing \"permutations\"");
  const auto& perms = j.at("permutations");
  if (!perms.is_array()) throw FormatError("schedule: \"permutations\" must be an array");
  for (std::size_t t = 0; t < perms.size(); ++t) s.permutations.push_back(spec_from_json(perms[t], "pi_" + std::to_string(t + 1)));
  return s;
}

inline std::string dump_schedule(const Schedule& s) { return to_json(s).dump(2) + "\n"; }

inline Schedule parse_schedule(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("schedule: ") + e.what());
  }
  return schedule_from_json(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
  if (!out) throw FormatError("write failed for " + path);
}

inline Schedule load_schedule(const std::string& path) { return parse_schedule(read_file(path)); }

/// {"d", "depth", "mode", "atoms": [[index, num, den], ...]} or [index, float] rows.
template <class S>
Json to_json(const Distribution<S>& p) {
  Json j;
  j["d"] = p.params().d();
  j["depth"] = p.params().depth_cap();
  j["mode"] = ScalarTraits<S>::exact ? "rational" : "float";
  j["atoms"] = Json::array();
  for (const auto& a : p.atoms()) {
    if constexpr (std::is_same_v<S, Rational>) {
      j["atoms"].push_back(Json::array({a.vertex.index, detail::integer_json(a.weight.get_num()), detail::integer_json(a.weight.get_den())}));
    } else {
      j["atoms"].push_back(Json::array({a.vertex.index, a.weight}));
    }
  }
  return j;
}

template <class S>
Distribution<S> distribution_from_json(const Json& j) {
  const auto d = detail::get_field<int>(j, "d", "distribution");
  const auto depth = detail::get_field<int>(j, "depth", "distribution");
  if (d < 2 || depth < 0) throw FormatError("distribution: bad d or depth");
  const TreeParams params(d, depth);
  if (!j.contains("atoms") || !j.at("atoms").is_array()) throw FormatError("distribution: missing \"atoms\"");
  std::vector<Atom<S>> atoms;
  for (const auto& row : j.at("atoms")) {
    if (!row.is_array() || row.empty()) throw FormatError("distribution: atoms must be [index, ...] rows");
    const VertexId v{detail::get_index(row[0], "distribution atom")};
    Rational w;
    if (row.size() == 3) {
      w = Rational(detail::integer_from_json(row[1], "distribution"), detail::integer_from_json(row[2], "distribution"));
      if (w.get_den() == 0) throw FormatError("distribution: zero denominator");
      w.canonicalize();
      atoms.push_back({v, convert_rational<S>(w)});
    } else if (row.size() == 2 && row[1].is_number()) {
      if constexpr (std::is_same_v<S, Rational>) {
        throw FormatError("distribution: float atom in a rational document");
      } else {
        atoms.push_back({v, row[1].get<double>()});
      }
    } else {
      throw FormatError("distribution: malformed atom row");
    }
  }
  try {
    return Distribution<S>(params, std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("distribution: ") + e.what());
  } catch (const BoundaryOverflow& e) {
    throw FormatError(std::string("distribution: ") + e.what());
  }
}

inline Json to_json(const GapSummary& s) {
  return Json{{"min", s.min}, {"q25", s.q25}, {"median", s.median}, {"q75", s.q75}, {"max", s.max}, {"mean", s.mean}};
}

/// Report document; the per-time series is included on request.
inline Json to_json(const CouplingReport& r, bool with_series = false) {
  Json j;
  j["kind"] = r.kind;
  j["horizon"] = r.horizon;
  j["seed"] = r.seed;
  j["gap"] = r.gap_definition;
  j["threshold"] = r.threshold_definition;
  j["violations"] = r.violations;
  j["last_violation"] = r.last_violation ? Json(*r.last_violation) : Json(nullptr);
  j["settle_time"] = r.settle_time();
  j["window_fractions"] = r.window_fractions;
  j["summary"] = to_json(r.summary);
  j["notes"] = r.notes;
  if (with_series) {
    j["gap_series"] = r.gap;
    Json thr = Json::array();
    for (double v : r.threshold) thr.push_back(std::isnan(v) ? Json(nullptr) : Json(v));
    j["threshold_series"] = std::move(thr);
  }
  return j;
}

/// Columns of a trace table; absent optional columns are left out.
struct TraceTable {
  std::vector<std::int64_t> depth_x;
  std::optional<std::vector<std::int64_t>> depth_y;
  std::optional<std::vector<std::int64_t>> gap;
  std::optional<std::vector<std::int64_t>> phi;
  std::optional<std::vector<double>> extra; // written as the last column
  std::string extra_name;
};

inline void write_trace_csv(std::ostream& out, const TraceTable& table) {
  const auto n = table.depth_x.size();
  auto check = [&](const auto& col, const char* name) {
    if (col && col->size() != n) throw std::invalid_argument(std::string("trace column ") + name + " has the wrong length");
  };
  check(table.depth_y, "depth_Y");
  check(table.gap, "gap");
  check(table.phi, "phi_t");
  check(table.extra, "extra");
  out << "t,depth_X";
  if (table.depth_y) out << ",depth_Y";
  if (table.gap) out << ",gap";
  if (table.phi) out << ",phi_t";
  if (table.extra) out << ',' << table.extra_name;
  out << '\n';
  for (std::size_t t = 0; t < n; ++t) {
    out << t << ',' << table.depth_x[t];
    if (table.depth_y) out << ',' << (*table.depth_y)[t];
    if (table.gap) out << ',' << (*table.gap)[t];
    if (table.phi) out << ',' << (*table.phi)[t];
    if (table.extra) out << ',' << format_double((*table.extra)[t]);
    out << '\n';
  }
}

} // namespace permwalk
