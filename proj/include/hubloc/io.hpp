#pragma once

// Instance and solution documents (JSON, schema_version 1).
//
// Instance document:
//   {
//     "schema_version": 1,
//     "name": "...",
//     "nodes": ["Rasht", ...],
//     "distances": [[...full n x n...]]  |  {"upper_triangular": [[d11..d1n], [d22..d2n], ...]},
//     "capacities": [...],
//     "coefficients": {"alpha": 0.4, "beta": 1, "delta": 1},
//     "origin": "Tabriz" | 3,                       (optional; name or 1-based index)
//     "demand_scenarios": [
//        {"probability": 0.25, "matrix": [[...]]}  |  {"probability": 0.25, "origin_row": [...]}
//     ],
//     "setup_scenarios": [[...], ...]  |  {"base": [...], "multipliers": [...], "scale": 1e6}
//   }
// Full demand matrices have their diagonal zeroed on load; the origin-row
// form keeps the origin's own market on W[origin][origin].

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "hubloc/core.hpp"
#include "hubloc/scenarios.hpp"
#include "hubloc/search.hpp"
#include "json.hpp"

namespace hubloc {

using json = nlohmann::json;

constexpr int kSchemaVersion = 1;

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

namespace detail {

// nlohmann's message without its own "[json.exception...] ... column N: " prefix.
inline std::string parse_reason(const char* what) {
  const std::string w = what;
  const auto col = w.find("column ");
  const auto sep = w.find(": ", col == std::string::npos ? 0 : col);
  return sep == std::string::npos ? w : w.substr(sep + 2);
}

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

[[noreturn]] inline void field_error(const std::string& path, const std::string& what) {
  throw ParseError("field '" + path + "': " + what);
}

inline const json& need(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) field_error(path, "expected a number");
  return v.get<double>();
}

inline std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Matrix full_matrix(const json& v, std::size_t n, const std::string& path) {
  if (!v.is_array() || v.size() != n) field_error(path, "expected " + std::to_string(n) + " rows");
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    auto row = number_list(v[i], rp);
    if (row.size() != n) field_error(rp, "expected " + std::to_string(n) + " entries");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = row[j];
  }
  return m;
}

inline Matrix parse_distances(const json& v, std::size_t n) {
  if (v.is_array()) return full_matrix(v, n, "distances");
  const json& up = need(v, "upper_triangular", "distances");
  if (!up.is_array() || up.size() != n) field_error("distances.upper_triangular", "expected " + std::to_string(n) + " rows");
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string rp = "distances.upper_triangular[" + std::to_string(i) + "]";
    auto row = number_list(up[i], rp);
    if (row.size() != n - i) field_error(rp, "expected " + std::to_string(n - i) + " entries (diagonal onward)");
    for (std::size_t t = 0; t < row.size(); ++t) {
      m(i, i + t) = row[t];
      m(i + t, i) = row[t];
    }
  }
  return m;
}

inline NodeIndex parse_node_ref(const json& v, const std::vector<std::string>& nodes, const std::string& path) {
  if (v.is_string()) {
    for (NodeIndex k = 0; k < nodes.size(); ++k)
      if (nodes[k] == v.get<std::string>()) return k;
    field_error(path, "unknown node '" + v.get<std::string>() + "'");
  }
  if (v.is_number_integer()) {
    const auto k = v.get<long long>();
    if (k < 1 || static_cast<std::size_t>(k) > nodes.size()) field_error(path, "node index out of range");
    return static_cast<NodeIndex>(k - 1);
  }
  field_error(path, "expected a node name or 1-based index");
}

}  // namespace detail

/// Parses an instance document and validates it.
inline Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("parse error at " + detail::line_col(text, e.byte ? e.byte - 1 : 0) + ": " + detail::parse_reason(e.what()));
  }
  if (!doc.is_object()) throw ParseError("instance document must be a JSON object");
  if (auto it = doc.find("schema_version"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<int>() != kSchemaVersion)
      detail::field_error("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
  }

  Instance inst;
  if (auto it = doc.find("name"); it != doc.end() && it->is_string()) inst.name = it->get<std::string>();
  const json& nodes = detail::need(doc, "nodes", "");
  if (!nodes.is_array() || nodes.empty()) detail::field_error("nodes", "expected a nonempty array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_string()) inst.nodes.push_back(nodes[i].get<std::string>());
    else if (nodes[i].is_number()) inst.nodes.push_back(nodes[i].dump());
    else detail::field_error("nodes[" + std::to_string(i) + "]", "expected a string");
  }
  const std::size_t n = inst.nodes.size();
  inst.distances = detail::parse_distances(detail::need(doc, "distances", ""), n);
  inst.capacities = detail::number_list(detail::need(doc, "capacities", ""), "capacities");

  const json& co = detail::need(doc, "coefficients", "");
  inst.coefficients.alpha = detail::number(detail::need(co, "alpha", "coefficients"), "coefficients.alpha");
  inst.coefficients.beta = detail::number(detail::need(co, "beta", "coefficients"), "coefficients.beta");
  inst.coefficients.delta = detail::number(detail::need(co, "delta", "coefficients"), "coefficients.delta");

  if (auto it = doc.find("origin"); it != doc.end() && !it->is_null())
    inst.origin = detail::parse_node_ref(*it, inst.nodes, "origin");

  const json& ds = detail::need(doc, "demand_scenarios", "");
  if (!ds.is_array()) detail::field_error("demand_scenarios", "expected an array");
  for (std::size_t s = 0; s < ds.size(); ++s) {
    const std::string sp = "demand_scenarios[" + std::to_string(s) + "]";
    DemandScenario sc;
    sc.probability = detail::number(detail::need(ds[s], "probability", sp), sp + ".probability");
    if (auto it = ds[s].find("matrix"); it != ds[s].end()) {
      sc.demand = detail::full_matrix(*it, n, sp + ".matrix");
      for (std::size_t i = 0; i < n; ++i) sc.demand(i, i) = 0.0;
    } else if (auto jt = ds[s].find("origin_row"); jt != ds[s].end()) {
      if (!inst.origin) detail::field_error(sp + ".origin_row", "requires a top-level 'origin'");
      auto row = detail::number_list(*jt, sp + ".origin_row");
      if (row.size() != n) detail::field_error(sp + ".origin_row", "expected " + std::to_string(n) + " entries");
      sc.demand = Matrix(n);
      for (std::size_t j = 0; j < n; ++j) sc.demand(*inst.origin, j) = row[j];
    } else {
      detail::field_error(sp, "needs 'matrix' or 'origin_row'");
    }
    inst.demand_scenarios.push_back(std::move(sc));
  }

  const json& ss = detail::need(doc, "setup_scenarios", "");
  if (ss.is_array()) {
    for (std::size_t t = 0; t < ss.size(); ++t)
      inst.setup_scenarios.push_back(detail::number_list(ss[t], "setup_scenarios[" + std::to_string(t) + "]"));
  } else if (ss.is_object()) {
    auto base = detail::number_list(detail::need(ss, "base", "setup_scenarios"), "setup_scenarios.base");
    auto mult = detail::number_list(detail::need(ss, "multipliers", "setup_scenarios"), "setup_scenarios.multipliers");
    double scale = 1.0;
    if (auto it = ss.find("scale"); it != ss.end()) scale = detail::number(*it, "setup_scenarios.scale");
    if (!(scale > 0.0)) detail::field_error("setup_scenarios.scale", "must be positive");
    for (double& b : base) b *= scale;
    try {
      inst.setup_scenarios = build_setup_scenarios(base, mult);
    } catch (const InputError& e) {
      detail::field_error("setup_scenarios.multipliers", e.what());
    }
  } else {
    detail::field_error("setup_scenarios", "expected an array or a {base, multipliers} object");
  }

  require_valid(inst);
  return inst;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Instance load_instance(const std::string& path) {
  try {
    return parse_instance(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

/// Full-form document for an instance; parse_instance(to_json(x)) == x.
inline json instance_to_json(const Instance& inst) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["name"] = inst.name;
  doc["nodes"] = inst.nodes;
  json d = json::array();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < inst.size(); ++j) row.push_back(inst.distances(i, j));
    d.push_back(row);
  }
  doc["distances"] = d;
  doc["capacities"] = inst.capacities;
  doc["coefficients"] = {{"alpha", inst.coefficients.alpha}, {"beta", inst.coefficients.beta}, {"delta", inst.coefficients.delta}};
  if (inst.origin) doc["origin"] = *inst.origin + 1;
  json ds = json::array();
  for (const auto& sc : inst.demand_scenarios) {
    json m = json::array();
    for (std::size_t i = 0; i < inst.size(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < inst.size(); ++j) row.push_back(sc.demand(i, j));
      m.push_back(row);
    }
    if (inst.origin) {
      json row = json::array();
      for (std::size_t j = 0; j < inst.size(); ++j) row.push_back(sc.demand(*inst.origin, j));
      ds.push_back({{"probability", sc.probability}, {"origin_row", row}});
    } else {
      ds.push_back({{"probability", sc.probability}, {"matrix", m}});
    }
  }
  doc["demand_scenarios"] = ds;
  doc["setup_scenarios"] = inst.setup_scenarios;
  return doc;
}

/// FNV-1a over the bit patterns of every numeric field plus node names.
inline std::uint64_t instance_checksum(const Instance& inst) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix_bytes = [&](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  auto mix = [&](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    mix_bytes(&bits, sizeof bits);
  };
  for (const auto& name : inst.nodes) mix_bytes(name.data(), name.size());
  for (double v : inst.distances.data()) mix(v);
  for (double v : inst.capacities) mix(v);
  mix(inst.coefficients.alpha);
  mix(inst.coefficients.beta);
  mix(inst.coefficients.delta);
  for (const auto& sc : inst.demand_scenarios) {
    mix(sc.probability);
    for (double v : sc.demand.data()) mix(v);
  }
  for (const auto& f : inst.setup_scenarios)
    for (double v : f) mix(v);
  mix(inst.origin ? static_cast<double>(*inst.origin) : -1.0);
  return h;
}

// ---------------------------------------------------------------------------
// Solutions

struct WriteOptions {
  bool timestamp = true;
};

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json hubs_json(const HubSet& h) {
  json a = json::array();
  for (NodeIndex k : h.indices()) a.push_back(k + 1);
  return a;
}

inline HubSet hubs_from_json(const json& a, std::size_t n, const std::string& path) {
  if (!a.is_array()) field_error(path, "expected an array of 1-based hub indices");
  HubSet h(n);
  for (const auto& v : a) {
    if (!v.is_number_integer()) field_error(path, "expected integers");
    const auto k = v.get<long long>();
    if (k < 1 || static_cast<std::size_t>(k) > n) field_error(path, "hub index out of range");
    h.set(static_cast<NodeIndex>(k - 1));
  }
  return h;
}

}  // namespace detail

inline json solution_to_json(const Solution& s) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "solution";
  doc["status"] = to_string(s.status);
  doc["num_nodes"] = s.hub_set.size();
  doc["hubs"] = detail::hubs_json(s.hub_set);
  doc["flow_cost"] = s.flow_cost;
  doc["setup_cost"] = s.setup_cost;
  doc["objective"] = s.objective;
  json routes = json::array();
  for (const auto& e : s.allocation.entries)
    routes.push_back({{"i", e.origin + 1}, {"j", e.destination + 1}, {"k", e.first_hub + 1}, {"m", e.second_hub + 1},
                      {"fraction", e.fraction}});
  doc["routes"] = routes;
  if (s.per_scenario_regret) doc["per_scenario_regret"] = *s.per_scenario_regret;
  if (s.max_regret) doc["max_regret"] = *s.max_regret;
  return doc;
}

inline Solution solution_from_json(const json& doc) {
  Solution s;
  const std::string status = detail::need(doc, "status", "").get<std::string>();
  if (status == "optimal") s.status = SolveStatus::optimal;
  else if (status == "infeasible") s.status = SolveStatus::infeasible;
  else detail::field_error("status", "unknown status '" + status + "'");
  const auto n = detail::need(doc, "num_nodes", "").get<std::size_t>();
  s.hub_set = detail::hubs_from_json(detail::need(doc, "hubs", ""), n, "hubs");
  s.flow_cost = detail::number(detail::need(doc, "flow_cost", ""), "flow_cost");
  s.setup_cost = detail::number(detail::need(doc, "setup_cost", ""), "setup_cost");
  s.objective = detail::number(detail::need(doc, "objective", ""), "objective");
  for (const auto& r : detail::need(doc, "routes", "")) {
    AllocationPlan::Entry e{};
    e.origin = r.at("i").get<std::size_t>() - 1;
    e.destination = r.at("j").get<std::size_t>() - 1;
    e.first_hub = r.at("k").get<std::size_t>() - 1;
    e.second_hub = r.at("m").get<std::size_t>() - 1;
    e.fraction = r.at("fraction").get<double>();
    s.allocation.entries.push_back(e);
  }
  if (auto it = doc.find("per_scenario_regret"); it != doc.end())
    s.per_scenario_regret = detail::number_list(*it, "per_scenario_regret");
  if (auto it = doc.find("max_regret"); it != doc.end()) s.max_regret = detail::number(*it, "max_regret");
  return s;
}

inline json regret_report_to_json(const RegretReport& r) {
  json doc = solution_to_json(r.solution);
  doc["kind"] = "regret_report";
  doc["scenario_optima"] = r.scenario_optima;
  json hubs = json::array();
  for (const auto& h : r.scenario_hubs) hubs.push_back(detail::hubs_json(h));
  doc["scenario_hubs"] = hubs;
  doc["chosen_setup_costs"] = r.chosen_setup_costs;
  doc["regrets"] = r.regrets;
  doc["report_max_regret"] = r.max_regret;
  if (!r.diagnostic.empty()) doc["diagnostic"] = r.diagnostic;
  return doc;
}

inline RegretReport regret_report_from_json(const json& doc) {
  RegretReport r;
  r.solution = solution_from_json(doc);
  const auto n = r.solution.hub_set.size();
  r.scenario_optima = detail::number_list(detail::need(doc, "scenario_optima", ""), "scenario_optima");
  for (const auto& h : detail::need(doc, "scenario_hubs", ""))
    r.scenario_hubs.push_back(detail::hubs_from_json(h, n, "scenario_hubs"));
  r.chosen_setup_costs = detail::number_list(detail::need(doc, "chosen_setup_costs", ""), "chosen_setup_costs");
  r.regrets = detail::number_list(detail::need(doc, "regrets", ""), "regrets");
  r.max_regret = detail::number(detail::need(doc, "report_max_regret", ""), "report_max_regret");
  if (auto it = doc.find("diagnostic"); it != doc.end()) r.diagnostic = it->get<std::string>();
  return r;
}

namespace detail {
inline void write_doc(json doc, const std::string& path, const WriteOptions& opt) {
  if (opt.timestamp) doc["timestamp"] = utc_timestamp();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw InputError("write failed for '" + path + "'");
}

inline json read_doc(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": parse error at " + line_col(text, e.byte ? e.byte - 1 : 0) + ": " + parse_reason(e.what()));
  }
}
}  // namespace detail

inline void write_solution(const Solution& s, const std::string& path, const WriteOptions& opt = {}) {
  detail::write_doc(solution_to_json(s), path, opt);
}

inline void write_solution(const RegretReport& r, const std::string& path, const WriteOptions& opt = {}) {
  detail::write_doc(regret_report_to_json(r), path, opt);
}

inline Solution load_solution(const std::string& path) { return solution_from_json(detail::read_doc(path)); }

inline RegretReport load_regret_report(const std::string& path) {
  return regret_report_from_json(detail::read_doc(path));
}

/// Human-readable description of both document formats.
inline const char* schema_text() {
  return R"(hubloc document schemas (schema_version 1)

Instance
  schema_version    1
  name              string (optional)
  nodes             array of names, length n
  distances         n x n array, or {"upper_triangular": rows i = 1..n holding d_ii .. d_in};
                    the triangular form is mirrored; a full matrix must be symmetric
  capacities        n positive numbers (hub capacity, flow units)
  coefficients      {"alpha": transfer, "beta": collection, "delta": distribution}
  origin            optional node name or 1-based index (single-origin instances)
  demand_scenarios  array of {"probability": p, "matrix": n x n}
                    or {"probability": p, "origin_row": n numbers} (requires origin);
                    probabilities sum to 1; matrix diagonals are zeroed on load
  setup_scenarios   array of n-vectors, or {"base": n numbers, "multipliers": [...], "scale": s}
                    giving scenario t = scale * multiplier_t * base

Solution (kind "solution")
  schema_version, kind, status ("optimal" | "infeasible"), num_nodes,
  hubs (1-based), flow_cost, setup_cost, objective,
  routes: [{"i", "j", "k", "m", "fraction"}] (x_ijkm, 1-based),
  per_scenario_regret, max_regret (minimax runs only), timestamp (optional)

Regret report (kind "regret_report")
  all solution fields plus scenario_optima (Z* per setup scenario),
  scenario_hubs, chosen_setup_costs, regrets, report_max_regret, diagnostic

Break-even table
  tab-delimited text with header: phi  seasonal_total  fixed_total
)";
}

}  // namespace hubloc
