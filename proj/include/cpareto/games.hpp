#pragma once

// Games induced by selecting one front point per coalition structure:
// values, payoffs, externalities, social welfare and stability.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpareto/coalitions.hpp"
#include "cpareto/error.hpp"
#include "cpareto/pareto.hpp"

namespace cpareto {

struct GameTable {
  std::vector<CoalitionStructure> structures;
  std::vector<ObjectivePoint> selected;
  /// values[s][i]: w((C_i, CS_s)) for the i-th coalition of structure s.
  std::vector<std::vector<double>> values;
  /// payoffs[s][a]: z_a in structure s (gamma_a F_a at the selected point).
  std::vector<std::vector<double>> payoffs;

  [[nodiscard]] std::size_t n_agents() const { return structures.empty() ? 0 : structures.front().n_agents(); }

  [[nodiscard]] std::size_t index_of(const CoalitionStructure& cs) const {
    for (std::size_t i = 0; i < structures.size(); ++i)
      if (structures[i] == cs) return i;
    detail::fail(Errc::ResultingStructureMissing, "structure " + cs.key() + " not in the game table");
  }

  [[nodiscard]] double value(const Coalition& c, const CoalitionStructure& cs) const {
    const auto s = index_of(cs);
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (structures[s][i] == c) return values[s][i];
    detail::fail(Errc::InvalidArgument, "coalition " + c.key() + " not in structure " + cs.key());
  }

  [[nodiscard]] double payoff(std::size_t agent, const CoalitionStructure& cs) const {
    return payoffs[index_of(cs)].at(agent);
  }
};

/// Selects one point per structure and fills values and payoffs.
inline GameTable build_game(std::span<const ParetoArchive> archives, const SelectionCriterion& criterion) {
  detail::require(!archives.empty(), Errc::EmptyInput, "no archives");
  GameTable g;
  for (const auto& ar : archives) {
    detail::require(!ar.empty(), Errc::EmptyArchive, "empty archive for structure " + ar.structure().key());
    const auto& cs = ar.structure();
    const auto& p = ar.points()[select_index(ar, criterion)];
    std::vector<double> z(cs.n_agents());
    for (std::size_t a = 0; a < z.size(); ++a) z[a] = ar.gamma()[a] * p.agent_values[a];
    std::vector<double> w(cs.size(), 0.0);
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (auto a : cs[i].members()) w[i] += z[a];
    g.structures.push_back(cs);
    g.selected.push_back(p);
    g.values.push_back(std::move(w));
    g.payoffs.push_back(std::move(z));
  }
  return g;
}

struct ExternalityRecord {
  Coalition coalition;
  CoalitionStructure coarse;  // CS
  CoalitionStructure fine;    // CS': one external coalition of CS split in two
  double value = 0.0;         // w((C,CS)) - w((C,CS'))
};

/// One record per (C, CS, CS') with CS' splitting one coalition of CS other than C.
inline std::vector<ExternalityRecord> externalities(const GameTable& game) {
  detail::require(game.n_agents() >= 3, Errc::TooFewAgents, "externalities need at least three agents");
  std::vector<ExternalityRecord> out;
  for (const auto& cs : game.structures) {
    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
      for (std::size_t di = 0; di < cs.size(); ++di) {
        if (di == ci || cs[di].size() < 2) continue;
        for (const auto& fine : detail::splits_of(cs, di))
          out.push_back({cs[ci], cs, fine, game.value(cs[ci], cs) - game.value(cs[ci], fine)});
      }
    }
  }
  return out;
}

enum class ExternalityClass { Negative, Positive, Mixed, Zero };

inline std::string to_string(ExternalityClass c) {
  switch (c) {
    case ExternalityClass::Negative: return "negative";
    case ExternalityClass::Positive: return "positive";
    case ExternalityClass::Mixed: return "mixed";
    case ExternalityClass::Zero: return "zero";
  }
  return "unknown";
}

/// Sign of an externality, zero within 1e-6 max(1, |w|).
inline int externality_sign(const ExternalityRecord& r, const GameTable& game) {
  const double scale = std::max(1.0, std::abs(game.value(r.coalition, r.coarse)));
  if (std::abs(r.value) <= 1e-6 * scale) return 0;
  return r.value > 0.0 ? 1 : -1;
}

inline ExternalityClass classify(const GameTable& game, std::span<const ExternalityRecord> records) {
  bool neg = false;
  bool pos = false;
  for (const auto& r : records) {
    const int s = externality_sign(r, game);
    neg = neg || s < 0;
    pos = pos || s > 0;
  }
  if (neg && pos) return ExternalityClass::Mixed;
  if (neg) return ExternalityClass::Negative;
  if (pos) return ExternalityClass::Positive;
  return ExternalityClass::Zero;
}

inline ExternalityClass classify(const GameTable& game) {
  const auto rec = externalities(game);
  return classify(game, rec);
}

struct WelfareReport {
  std::vector<double> welfare;  // per structure, game order
  std::vector<std::size_t> argmax;
};

inline WelfareReport social_welfare(const GameTable& game) {
  WelfareReport r;
  for (const auto& w : game.values) {
    double s = 0.0;
    for (double v : w) s += v;
    r.welfare.push_back(s);
  }
  if (r.welfare.empty()) return r;
  const double best = *std::max_element(r.welfare.begin(), r.welfare.end());
  const double tol = 1e-9 * std::max(1.0, std::abs(best));
  for (std::size_t i = 0; i < r.welfare.size(); ++i)
    if (r.welfare[i] >= best - tol) r.argmax.push_back(i);
  return r;
}

struct DeviationRule {
  bool single_exit = true;
  bool pair_exit = true;
  bool subset_exit = false;
  /// Every deviating agent must gain strictly more than eta.
  double eta = 1.0;
  /// Compare payoffs rounded to integers, as tabulated.
  bool compare_rounded = true;

  void validate() const {
    detail::require(single_exit || pair_exit || subset_exit, Errc::InvalidArgument, "no deviation class enabled");
    detail::require(eta >= 0.0 && std::isfinite(eta), Errc::InvalidArgument, "eta must be nonnegative");
  }

  [[nodiscard]] bool allows(std::size_t size) const {
    return subset_exit || (single_exit && size == 1) || (pair_exit && size == 2);
  }
};

/// Parses a comma-separated list of single, pair, subset.
inline DeviationRule parse_deviation_classes(const std::string& text, DeviationRule rule = {}) {
  rule.single_exit = rule.pair_exit = rule.subset_exit = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find(',', pos), text.size());
    const auto tok = text.substr(pos, end - pos);
    if (tok == "single")
      rule.single_exit = true;
    else if (tok == "pair")
      rule.pair_exit = true;
    else if (tok == "subset")
      rule.subset_exit = true;
    else
      detail::fail(Errc::InvalidArgument, "unknown deviation class '" + tok + "'");
    pos = end + 1;
  }
  rule.validate();
  return rule;
}

/// Structure after the agents of `s` leave their coalitions and form one new coalition.
inline CoalitionStructure deviate(const CoalitionStructure& cs, AgentMask s) {
  std::vector<Coalition> parts;
  for (const auto& c : cs.coalitions()) {
    const AgentMask rest = c.mask() & ~s;
    if (rest) parts.emplace_back(rest);
  }
  parts.emplace_back(s);
  return {cs.n_agents(), std::move(parts)};
}

struct Deviation {
  std::size_t structure = 0;  // game index of the structure left
  AgentMask deviators = 0;
  std::size_t result = 0;     // game index of the resulting structure
};

/// First profitable deviation from structure `s`, if any (deviators by increasing mask).
inline std::optional<Deviation> profitable_deviation(const GameTable& game, std::size_t s, const DeviationRule& rule) {
  const auto& cs = game.structures[s];
  const auto full = CoalitionStructure::full_mask(cs.n_agents());
  auto pay = [&](std::size_t idx, std::size_t a) {
    const double z = game.payoffs[idx][a];
    return rule.compare_rounded ? std::round(z) : z;
  };
  for (AgentMask m = 1; m <= full; ++m) {
    const auto size = static_cast<std::size_t>(std::popcount(m));
    if (!rule.allows(size)) continue;
    const bool already = std::any_of(cs.coalitions().begin(), cs.coalitions().end(),
                                     [&](const Coalition& c) { return c.mask() == m; });
    if (already) continue;
    const std::size_t t = game.index_of(deviate(cs, m));
    bool all_gain = true;
    for (std::size_t a = 0; a < cs.n_agents() && all_gain; ++a)
      if (m & (AgentMask{1} << a)) all_gain = pay(t, a) > pay(s, a) + rule.eta;
    if (all_gain) return Deviation{s, m, t};
  }
  return std::nullopt;
}

/// Game indices of structures with no profitable deviation.
inline std::vector<std::size_t> stable_structures(const GameTable& game, const DeviationRule& rule) {
  rule.validate();
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < game.structures.size(); ++s)
    if (!profitable_deviation(game, s, rule)) out.push_back(s);
  return out;
}

}  // namespace cpareto
