#pragma once

// Per-structure front export (CSV and JSON) and JSON re-import.

#include <sstream>
#include <string>
#include <vector>

#include "cpareto/bundle.hpp"

namespace cpareto {

/// "{1,2}|{3}" -> "1-2_3", usable as a file-name stem.
inline std::string structure_file_stem(const CoalitionStructure& cs) {
  std::string out;
  for (char c : cs.key()) {
    if (c == '{' || c == '}') continue;
    out += c == ',' ? '-' : c == '|' ? '_' : c;
  }
  return out;
}

/// One row per point: coalition objectives, then decision variables. A leading
/// comment line names the structure.
inline std::string front_to_csv(const ParetoArchive& ar) {
  const auto& cs = ar.structure();
  std::ostringstream os;
  os.precision(17);
  os << "# structure=" << cs.key() << "\n";
  bool first = true;
  for (const auto& c : cs.coalitions()) {
    os << (first ? "" : ",") << "\"F" << c.key() << "\"";
    first = false;
  }
  const std::size_t n_dv = ar.empty() ? 0 : ar.points().front().decision.size();
  for (std::size_t j = 0; j < n_dv; ++j) os << ",q" << (j + 1);
  os << "\n";
  for (std::size_t i = 0; i < ar.size(); ++i) {
    first = true;
    for (double v : ar.objectives()[i]) {
      os << (first ? "" : ",") << v;
      first = false;
    }
    for (double q : ar.points()[i].decision) os << "," << q;
    os << "\n";
  }
  return os.str();
}

inline ojson front_to_json(const ParetoArchive& ar, const std::vector<std::string>& labels) {
  ojson pts = ojson::array();
  for (std::size_t i = 0; i < ar.size(); ++i) {
    auto p = detail::point_to_json(ar.points()[i]);
    p["objectives"] = ar.objectives()[i];
    pts.push_back(p);
  }
  return ojson{{"format_version", kBundleFormatVersion},
               {"kind", "front"},
               {"structure", ar.structure().key()},
               {"agents", labels},
               {"gamma", ar.gamma()},
               {"points", pts}};
}

inline ParetoArchive front_from_json(const ojson& j) {
  if (!j.is_object() || j.value("kind", std::string()) != "front") detail::bad_bundle("$", "not a front document");
  if (j.value("format_version", 0) != kBundleFormatVersion) detail::bad_bundle("$.format_version", "unsupported version");
  try {
    const auto labels = j.at("agents").get<std::vector<std::string>>();
    const auto cs = CoalitionStructure::parse(j.at("structure").get<std::string>(), labels.size());
    const auto gamma = j.at("gamma").get<std::vector<double>>();
    return archive_from_json(j.at("points"), cs, gamma, 0, "$.points");
  } catch (const nlohmann::json::exception& e) {
    detail::bad_bundle("$", e.what());
  }
}

}  // namespace cpareto
