#pragma once

// Scenario files: JSON with {"value", "unit"} annotations on physical
// quantities. See docs/scenario_format.md.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cpareto/error.hpp"
#include "cpareto/physics.hpp"

namespace cpareto {

inline constexpr int kScenarioFormatVersion = 1;

namespace detail {

using nlohmann::json;

[[noreturn]] inline void bad_scenario(const std::string& path, const std::string& msg) {
  fail(Errc::ParseError, "scenario: " + path + ": " + msg);
}

inline const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) bad_scenario(path, "missing field '" + key + "'");
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) bad_scenario(path, "expected a number");
  return j.get<double>();
}

inline std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) bad_scenario(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

// Returns the value of a {"value", "unit"} object after checking the unit.
inline double quantity(const json& j, const std::string& path, std::string* unit_out) {
  if (!j.is_object()) bad_scenario(path, "expected {\"value\": ..., \"unit\": ...}");
  const double v = number(field(j, "value", path), path + ".value");
  const auto& u = field(j, "unit", path);
  if (!u.is_string()) bad_scenario(path + ".unit", "expected a string");
  *unit_out = u.get<std::string>();
  return v;
}

inline double quantity_in(const json& j, const std::string& path, const std::string& expected) {
  std::string unit;
  const double v = quantity(j, path, &unit);
  if (unit != expected) bad_scenario(path + ".unit", "expected '" + expected + "', got '" + unit + "'");
  return v;
}

inline double time_seconds(const json& j, const std::string& path) {
  std::string unit;
  const double v = quantity(j, path, &unit);
  if (unit == "s") return v;
  if (unit == "day") return v * 86400.0;
  if (unit == "year") return v * kSecondsPerYear;
  bad_scenario(path + ".unit", "time unit must be s, day or year");
}

inline double length_m(const json& j, const std::string& path) {
  std::string unit;
  const double v = quantity(j, path, &unit);
  if (unit == "m") return v;
  if (unit == "km") return v * 1000.0;
  bad_scenario(path + ".unit", "length unit must be m or km");
}

inline json q(double v, const char* unit) { return json{{"value", v}, {"unit", unit}}; }

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
  using namespace detail;
  if (!j.is_object()) bad_scenario("$", "expected an object");
  const auto version = field(j, "format_version", "$");
  if (!version.is_number_integer() || version.get<int>() != kScenarioFormatVersion)
    bad_scenario("$.format_version", "unsupported version");

  Scenario s;
  s.name = field(j, "name", "$").get<std::string>();
  if (j.contains("description")) s.description = j.at("description").get<std::string>();
  const auto model = field(j, "model", "$").get<std::string>();
  if (model == "linear")
    s.model = ModelKind::Linear;
  else if (model == "proxy")
    s.model = ModelKind::Proxy;
  else
    bad_scenario("$.model", "must be 'linear' or 'proxy'");

  const auto& agents = field(j, "agents", "$");
  if (!agents.is_array()) bad_scenario("$.agents", "expected an array of labels");
  for (const auto& a : agents) s.agent_labels.push_back(a.get<std::string>());
  if (j.contains("gamma")) {
    for (const auto& g : j.at("gamma")) s.gamma.push_back(number(g, "$.gamma[]"));
  } else {
    s.gamma.assign(s.agent_labels.size(), 1.0);
  }

  s.rate_unit = field(j, "rate_unit", "$").get<std::string>();
  if (j.contains("volume_unit")) s.volume_unit = j.at("volume_unit").get<std::string>();

  const auto& wells = field(j, "wells", "$");
  if (!wells.is_array()) bad_scenario("$.wells", "expected an array");
  const auto coord_unit = j.value("coordinate_unit", std::string("m"));
  if (coord_unit != "m" && coord_unit != "km") bad_scenario("$.coordinate_unit", "must be m or km");
  const double coord_scale = coord_unit == "km" ? 1000.0 : 1.0;
  for (std::size_t i = 0; i < wells.size(); ++i) {
    const auto p = "$.wells[" + std::to_string(i) + "]";
    Well w;
    w.x = number(field(wells[i], "x", p), p + ".x") * coord_scale;
    w.y = number(field(wells[i], "y", p), p + ".y") * coord_scale;
    w.agent = count(field(wells[i], "agent", p), p + ".agent");
    if (wells[i].contains("start_offset")) w.start_offset = count(wells[i].at("start_offset"), p + ".start_offset");
    s.wells.push_back(w);
  }

  s.n_intervals = count(field(j, "n_intervals", "$"), "$.n_intervals");
  s.dt_seconds = time_seconds(field(j, "dt", "$"), "$.dt");
  s.q_min = quantity_in(field(j, "q_min", "$"), "$.q_min", s.rate_unit);
  s.q_max = quantity_in(field(j, "q_max", "$"), "$.q_max", s.rate_unit);

  if (s.model == ModelKind::Linear) {
    s.h_crit = length_m(field(j, "h_crit", "$"), "$.h_crit");
    s.storage = quantity_in(field(j, "storage", "$"), "$.storage", "1");
    s.transmissivity = quantity_in(field(j, "transmissivity", "$"), "$.transmissivity", "m2/s");
    s.r_well = length_m(field(j, "r_well", "$"), "$.r_well");
    if (j.contains("q_vol"))
      s.q_vol = quantity_in(j.at("q_vol"), "$.q_vol", "m3/s per " + s.rate_unit);
  } else {
    s.h_crit = quantity_in(field(j, "h_crit", "$"), "$.h_crit", "proxy");
    const auto& p = field(j, "proxy", "$");
    s.proxy.length_scale = length_m(field(p, "length_scale", "$.proxy"), "$.proxy.length_scale");
    s.proxy.kappa = number(field(p, "kappa", "$.proxy"), "$.proxy.kappa");
    s.proxy.exponent = number(field(p, "exponent", "$.proxy"), "$.proxy.exponent");
    if (p.contains("couplings")) {
      const auto& cs = p.at("couplings");
      for (std::size_t i = 0; i < cs.size(); ++i) {
        const auto path = "$.proxy.couplings[" + std::to_string(i) + "]";
        const auto& pair = field(cs[i], "wells", path);
        if (!pair.is_array() || pair.size() != 2) bad_scenario(path + ".wells", "expected two well indices");
        s.proxy.couplings.push_back({count(pair[0], path + ".wells[0]"), count(pair[1], path + ".wells[1]"),
                                     number(field(cs[i], "coefficient", path), path + ".coefficient")});
      }
    }
  }
  try {
    s.validate();
  } catch (const Error& e) {
    fail(e.code(), std::string("scenario: ") + e.what());
  }
  return s;
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using detail::q;
  using nlohmann::json;
  json j;
  j["format_version"] = kScenarioFormatVersion;
  j["name"] = s.name;
  if (!s.description.empty()) j["description"] = s.description;
  j["model"] = s.model == ModelKind::Linear ? "linear" : "proxy";
  j["agents"] = s.agent_labels;
  j["gamma"] = s.gamma;
  j["rate_unit"] = s.rate_unit;
  j["volume_unit"] = s.volume_unit;
  j["coordinate_unit"] = "m";
  json wells = json::array();
  for (const auto& w : s.wells)
    wells.push_back({{"x", w.x}, {"y", w.y}, {"agent", w.agent}, {"start_offset", w.start_offset}});
  j["wells"] = wells;
  j["n_intervals"] = s.n_intervals;
  j["dt"] = q(s.dt_seconds, "s");
  j["q_min"] = q(s.q_min, s.rate_unit.c_str());
  j["q_max"] = q(s.q_max, s.rate_unit.c_str());
  if (s.model == ModelKind::Linear) {
    j["h_crit"] = q(s.h_crit, "m");
    j["storage"] = q(s.storage, "1");
    j["transmissivity"] = q(s.transmissivity, "m2/s");
    j["r_well"] = q(s.r_well, "m");
    j["q_vol"] = json{{"value", s.q_vol}, {"unit", "m3/s per " + s.rate_unit}};
  } else {
    j["h_crit"] = q(s.h_crit, "proxy");
    json couplings = json::array();
    for (const auto& c : s.proxy.couplings)
      couplings.push_back({{"wells", {c.well_a, c.well_b}}, {"coefficient", c.coefficient}});
    j["proxy"] = {{"length_scale", q(s.proxy.length_scale, "m")},
                  {"kappa", s.proxy.kappa},
                  {"exponent", s.proxy.exponent},
                  {"couplings", couplings}};
  }
  return j;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  detail::require(in.good(), Errc::ParseError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    detail::fail(Errc::ParseError, path + ": " + e.what());
  }
}

inline Scenario load_scenario(const std::string& path) {
  try {
    return scenario_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    detail::fail(Errc::ParseError, path + ": " + e.what());
  }
}

}  // namespace cpareto
