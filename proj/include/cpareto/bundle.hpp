#pragma once

// Run bundles (scenario + every front + run metadata) and game reports, as
// JSON documents and aligned text.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cpareto/coalitions.hpp"
#include "cpareto/error.hpp"
#include "cpareto/games.hpp"
#include "cpareto/pareto.hpp"
#include "cpareto/physics.hpp"
#include "cpareto/scenario_io.hpp"
#include "cpareto/strategy.hpp"

namespace cpareto {

inline constexpr int kBundleFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

using ojson = nlohmann::ordered_json;

struct RunBundle {
  Scenario scenario;
  std::string method;    // "linear" or "evolutionary"
  std::string strategy;  // to_string(StrategyKind)
  std::uint64_t seed = 0;
  /// Method settings echoed verbatim (population, generations, grid, ...).
  ojson config = ojson::object();
  EvalBudgetReport budget;
  std::vector<ParetoArchive> archives;  // enumerate_structures order

  [[nodiscard]] const ParetoArchive& archive_for(const CoalitionStructure& cs) const {
    for (const auto& a : archives)
      if (a.structure() == cs) return a;
    detail::fail(Errc::UnknownStructure, "bundle has no archive for " + cs.key());
  }
};

namespace detail {

[[noreturn]] inline void bad_bundle(const std::string& path, const std::string& msg) {
  fail(Errc::ParseError, "bundle: " + path + ": " + msg);
}

inline ojson point_to_json(const ObjectivePoint& p) {
  return ojson{{"decision", p.decision}, {"agent_values", p.agent_values}};
}

inline std::vector<double> number_array(const ojson& j, const std::string& path) {
  if (!j.is_array()) bad_bundle(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) bad_bundle(path, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

inline ojson budget_to_json(const EvalBudgetReport& b) {
  ojson per = ojson::object();
  for (const auto& [k, v] : b.per_structure) per[k] = v;
  return ojson{{"extreme_point_runs", b.extreme_point_runs},
               {"moo_runs", b.moo_runs},
               {"postprocessing", b.postprocessing},
               {"total", b.total()},
               {"extreme_run_count", b.extreme_runs_count},
               {"moo_run_count", b.moo_runs_count},
               {"per_structure", per}};
}

inline EvalBudgetReport budget_from_json(const ojson& j) {
  EvalBudgetReport b;
  b.extreme_point_runs = j.at("extreme_point_runs").get<std::uint64_t>();
  b.moo_runs = j.at("moo_runs").get<std::uint64_t>();
  b.postprocessing = j.at("postprocessing").get<std::uint64_t>();
  b.extreme_runs_count = j.value("extreme_run_count", std::uint64_t{0});
  b.moo_runs_count = j.value("moo_run_count", std::uint64_t{0});
  if (j.contains("per_structure"))
    for (const auto& [k, v] : j.at("per_structure").items()) b.per_structure.emplace_back(k, v.get<std::uint64_t>());
  if (j.contains("total") && j.at("total").get<std::uint64_t>() != b.total())
    bad_bundle("$.budget.total", "does not equal the sum of its parts");
  return b;
}

}  // namespace detail

inline ojson archive_points_to_json(const ParetoArchive& ar) {
  ojson pts = ojson::array();
  for (const auto& p : ar.points()) pts.push_back(detail::point_to_json(p));
  return pts;
}

/// Rebuilds an archive from serialized points; rejects sets that are not a valid archive.
inline ParetoArchive archive_from_json(const ojson& pts, const CoalitionStructure& cs, const std::vector<double>& gamma,
                                       std::size_t n_decision, const std::string& path) {
  if (!pts.is_array()) detail::bad_bundle(path, "expected an array of points");
  std::vector<ObjectivePoint> raw;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto p = path + "[" + std::to_string(i) + "]";
    if (!pts[i].is_object() || !pts[i].contains("decision") || !pts[i].contains("agent_values"))
      detail::bad_bundle(p, "point needs 'decision' and 'agent_values'");
    ObjectivePoint op;
    op.decision = detail::number_array(pts[i].at("decision"), p + ".decision");
    op.agent_values = detail::number_array(pts[i].at("agent_values"), p + ".agent_values");
    if (op.agent_values.size() != cs.n_agents()) detail::bad_bundle(p + ".agent_values", "length differs from the agent count");
    if (n_decision && op.decision.size() != n_decision) detail::bad_bundle(p + ".decision", "length differs from the scenario");
    raw.push_back(std::move(op));
  }
  auto ar = ParetoArchive::from_candidates(cs, gamma, raw);
  if (ar.size() != raw.size()) detail::bad_bundle(path, "points are not a mutually non-dominated, duplicate-free set");
  return ar;
}

inline ojson bundle_to_json(const RunBundle& b) {
  ojson j;
  j["format_version"] = kBundleFormatVersion;
  j["kind"] = "run_bundle";
  j["scenario"] = ojson::parse(scenario_to_json(b.scenario).dump());
  j["agents"] = b.scenario.agent_labels;
  j["method"] = b.method;
  j["strategy"] = b.strategy;
  j["seed"] = b.seed;
  j["config"] = b.config;
  j["budget"] = detail::budget_to_json(b.budget);
  ojson archives = ojson::object();
  for (const auto& ar : b.archives) archives[ar.structure().key()] = archive_points_to_json(ar);
  j["archives"] = archives;
  return j;
}

inline RunBundle bundle_from_json(const ojson& j) {
  using detail::bad_bundle;
  if (!j.is_object()) bad_bundle("$", "expected an object");
  if (!j.contains("format_version") || !j.at("format_version").is_number_integer())
    bad_bundle("$.format_version", "missing");
  if (j.at("format_version").get<int>() != kBundleFormatVersion)
    bad_bundle("$.format_version", "unsupported version " + j.at("format_version").dump());
  for (const char* k : {"scenario", "method", "strategy", "seed", "budget", "archives"})
    if (!j.contains(k)) bad_bundle("$", std::string("missing field '") + k + "'");
  RunBundle b;
  try {
    b.scenario = scenario_from_json(nlohmann::json::parse(j.at("scenario").dump()));
    b.method = j.at("method").get<std::string>();
    b.strategy = j.at("strategy").get<std::string>();
    b.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("config")) b.config = j.at("config");
    b.budget = detail::budget_from_json(j.at("budget"));
  } catch (const nlohmann::json::exception& e) {
    bad_bundle("$", e.what());
  }
  if (j.contains("agents") && j.at("agents") != ojson(b.scenario.agent_labels))
    bad_bundle("$.agents", "labels differ from the scenario");

  const auto& archives = j.at("archives");
  if (!archives.is_object()) bad_bundle("$.archives", "expected an object keyed by structure");
  const AgentSet agents(b.scenario.n_agents(), b.scenario.agent_labels);
  const auto structures = enumerate_structures(agents);
  if (archives.size() != structures.size())
    bad_bundle("$.archives", "expected " + std::to_string(structures.size()) + " structures, found " +
                                 std::to_string(archives.size()));
  for (const auto& cs : structures) {
    const auto key = cs.key();
    if (!archives.contains(key)) bad_bundle("$.archives", "missing structure " + key);
    b.archives.push_back(
        archive_from_json(archives.at(key), cs, b.scenario.gamma, b.scenario.n_decision(), "$.archives." + key));
  }
  return b;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  detail::require(out.good(), Errc::InvalidArgument, "cannot write " + path);
  out << text;
  detail::require(out.good(), Errc::InvalidArgument, "write failed for " + path);
}

inline void save_bundle(const RunBundle& b, const std::string& path) { write_text_file(path, bundle_to_json(b).dump(1) + "\n"); }

inline RunBundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), Errc::ParseError, "cannot open " + path);
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    detail::fail(Errc::ParseError, path + ": " + e.what());
  }
  return bundle_from_json(j);
}

// ---------------------------------------------------------------------------
// Game reports

struct GameReport {
  std::string scenario_name;
  std::vector<std::string> agent_labels;
  SelectionCriterion criterion;
  DeviationRule rule;
  GameTable game;
  std::vector<ExternalityRecord> externalities;
  ExternalityClass classification = ExternalityClass::Zero;
  WelfareReport welfare;
  std::vector<std::size_t> stable;
  std::vector<Deviation> deviations;  // one witness per unstable structure
};

inline GameReport analyze_game(const RunBundle& b, const SelectionCriterion& criterion, const DeviationRule& rule) {
  GameReport r;
  r.scenario_name = b.scenario.name;
  r.agent_labels = b.scenario.agent_labels;
  r.criterion = criterion;
  r.rule = rule;
  r.game = build_game(b.archives, criterion);
  if (b.scenario.n_agents() >= 3) {
    r.externalities = externalities(r.game);
    r.classification = classify(r.game, r.externalities);
  }
  r.welfare = social_welfare(r.game);
  r.stable = stable_structures(r.game, rule);
  for (std::size_t s = 0; s < r.game.structures.size(); ++s)
    if (auto d = profitable_deviation(r.game, s, rule)) r.deviations.push_back(*d);
  return r;
}

inline ojson criterion_to_json(const SelectionCriterion& c) {
  if (const auto* u = std::get_if<UtopiaWeighted>(&c)) return ojson{{"kind", "utopia"}, {"beta", u->agent_weights}, {"p", u->p}};
  return ojson{{"kind", "favor"}, {"agent", std::get<FavorAgent>(c).agent}};
}

inline ojson report_to_json(const GameReport& r) {
  const auto& g = r.game;
  ojson j;
  j["format_version"] = kReportFormatVersion;
  j["kind"] = "game_report";
  j["scenario"] = r.scenario_name;
  j["agents"] = r.agent_labels;
  j["criterion"] = criterion_to_json(r.criterion);
  ojson rows = ojson::array();
  for (std::size_t s = 0; s < g.structures.size(); ++s) {
    const auto& cs = g.structures[s];
    ojson coalitions = ojson::array();
    for (std::size_t i = 0; i < cs.size(); ++i) coalitions.push_back({{"coalition", cs[i].key()}, {"value", g.values[s][i]}});
    rows.push_back({{"structure", cs.key()},
                    {"level", cs.size()},
                    {"welfare", r.welfare.welfare[s]},
                    {"coalitions", coalitions},
                    {"payoffs", g.payoffs[s]},
                    {"selected", detail::point_to_json(g.selected[s])}});
  }
  j["structures"] = rows;
  ojson ext = ojson::array();
  for (const auto& e : r.externalities)
    ext.push_back({{"coalition", e.coalition.key()},
                   {"structure", e.coarse.key()},
                   {"refined", e.fine.key()},
                   {"value", e.value},
                   {"sign", externality_sign(e, g)}});
  j["externalities"] = ext;
  j["classification"] = r.externalities.empty() ? ojson(nullptr) : ojson(to_string(r.classification));
  ojson wm = ojson::array();
  for (auto i : r.welfare.argmax) wm.push_back(g.structures[i].key());
  j["welfare_maximizing"] = wm;
  ojson classes = ojson::array();
  if (r.rule.single_exit) classes.push_back("single");
  if (r.rule.pair_exit) classes.push_back("pair");
  if (r.rule.subset_exit) classes.push_back("subset");
  ojson stable = ojson::array();
  for (auto i : r.stable) stable.push_back(g.structures[i].key());
  ojson devs = ojson::array();
  for (const auto& d : r.deviations)
    devs.push_back({{"structure", g.structures[d.structure].key()},
                    {"deviators", Coalition(d.deviators).key()},
                    {"result", g.structures[d.result].key()}});
  j["stability"] = {{"rule", {{"classes", classes}, {"eta", r.rule.eta}, {"compare_rounded", r.rule.compare_rounded}}},
                    {"stable", stable},
                    {"deviations", devs}};
  return j;
}

namespace detail {

inline std::string fixed0(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(0) << v;
  return os.str();
}

inline std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }
inline std::string lpad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

}  // namespace detail

/// Table-1 style text: one line per embedded coalition, payoffs of its members
/// in brackets, then classification, welfare maximizers and stable structures.
inline std::string render_report_text(const GameReport& r) {
  using detail::fixed0;
  using detail::lpad;
  using detail::pad;
  const auto& g = r.game;
  std::ostringstream os;
  os << "scenario: " << r.scenario_name << "\n";
  if (const auto* u = std::get_if<UtopiaWeighted>(&r.criterion)) {
    os << "criterion: utopia, beta = (";
    for (std::size_t i = 0; i < u->agent_weights.size(); ++i) os << (i ? ", " : "") << u->agent_weights[i];
    os << "), p = " << u->p << "\n";
  } else {
    os << "criterion: favor agent " << r.agent_labels.at(std::get<FavorAgent>(r.criterion).agent) << "\n";
  }
  os << "\n" << pad("structure", 16) << pad("coalition", 12) << lpad("value", 8) << "  payoffs\n";
  for (std::size_t s = 0; s < g.structures.size(); ++s) {
    const auto& cs = g.structures[s];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      os << pad(i == 0 ? cs.key() : "", 16) << pad(cs[i].key(), 12) << lpad(fixed0(g.values[s][i]), 8);
      if (cs[i].size() > 1) {
        os << "  (";
        bool first = true;
        for (auto a : cs[i].members()) {
          os << (first ? "" : ", ") << fixed0(g.payoffs[s][a]);
          first = false;
        }
        os << ")";
      }
      os << "\n";
    }
  }
  os << "\n";
  if (!r.externalities.empty()) {
    os << "externalities: " << to_string(r.classification) << "\n";
    for (const auto& e : r.externalities)
      os << "  eps(" << e.coalition.key() << ", " << e.coarse.key() << " -> " << e.fine.key() << ") = " << fixed0(e.value)
         << " (" << e.value << ")\n";
  }
  os << "welfare-maximizing:";
  for (auto i : r.welfare.argmax) os << " " << g.structures[i].key();
  os << "  (W = " << fixed0(r.welfare.welfare[r.welfare.argmax.front()]) << ")\n";
  os << "stable:";
  if (r.stable.empty()) os << " none";
  for (auto i : r.stable) os << " " << g.structures[i].key();
  os << "\n";
  return os.str();
}

}  // namespace cpareto
