#pragma once

// Agents, coalitions and coalition structures (set partitions of the agent set),
// together with the refinement order and the coalition structure graph.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cpareto/error.hpp"

namespace cpareto {

inline constexpr std::size_t kMaxAgents = 12;

using AgentMask = std::uint32_t;

class AgentSet {
 public:
  explicit AgentSet(std::size_t n_agents) : AgentSet(n_agents, default_labels(n_agents)) {}

  AgentSet(std::size_t n_agents, std::vector<std::string> labels) : n_(n_agents), labels_(std::move(labels)) {
    detail::require(n_ >= 1, Errc::InvalidArgument, "agent set must contain at least one agent");
    detail::require(labels_.size() == n_, Errc::LengthMismatch, "one label per agent required");
    std::set<std::string> unique(labels_.begin(), labels_.end());
    detail::require(unique.size() == labels_.size(), Errc::InvalidArgument, "agent labels must be distinct");
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

  static std::vector<std::string> default_labels(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back("a" + std::to_string(i + 1));
    return out;
  }

 private:
  std::size_t n_;
  std::vector<std::string> labels_;
};

/// Nonempty set of agent indices, stored as a bit mask.
class Coalition {
 public:
  Coalition() = default;
  explicit Coalition(AgentMask mask) : mask_(mask) {
    detail::require(mask != 0, Errc::InvalidArgument, "coalition must be nonempty");
  }

  static Coalition of(std::initializer_list<std::size_t> members) {
    AgentMask m = 0;
    for (auto a : members) m |= AgentMask{1} << a;
    return Coalition(m);
  }

  [[nodiscard]] AgentMask mask() const noexcept { return mask_; }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }
  [[nodiscard]] bool contains(std::size_t agent) const noexcept { return (mask_ >> agent) & 1U; }
  [[nodiscard]] std::size_t smallest() const noexcept { return static_cast<std::size_t>(std::countr_zero(mask_)); }
  [[nodiscard]] bool subset_of(const Coalition& other) const noexcept { return (mask_ & ~other.mask_) == 0; }

  [[nodiscard]] std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (AgentMask m = mask_; m != 0; m &= m - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    return out;
  }

  /// "{1,3}" with 1-based agent numbers.
  [[nodiscard]] std::string key() const {
    std::string s = "{";
    bool first = true;
    for (auto a : members()) {
      if (!first) s += ',';
      s += std::to_string(a + 1);
      first = false;
    }
    s += '}';
    return s;
  }

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  AgentMask mask_ = 0;
};

/// Partition of {0..n-1}. Coalitions are kept sorted by smallest member, so
/// equal partitions always have identical keys.
class CoalitionStructure {
 public:
  CoalitionStructure() = default;

  CoalitionStructure(std::size_t n_agents, std::vector<Coalition> coalitions)
      : n_(n_agents), coalitions_(std::move(coalitions)) {
    detail::require(n_ >= 1 && n_ <= 31, Errc::InvalidArgument, "agent count out of range");
    AgentMask seen = 0;
    for (const auto& c : coalitions_) {
      detail::require(c.mask() != 0, Errc::InvalidArgument, "empty coalition");
      detail::require((seen & c.mask()) == 0, Errc::InvalidArgument, "coalitions overlap");
      seen |= c.mask();
    }
    detail::require(seen == full_mask(n_), Errc::InvalidArgument, "coalitions do not cover the agent set");
    std::sort(coalitions_.begin(), coalitions_.end(),
              [](const Coalition& a, const Coalition& b) { return a.smallest() < b.smallest(); });
  }

  static CoalitionStructure grand(std::size_t n) { return {n, {Coalition(full_mask(n))}}; }

  static CoalitionStructure singletons(std::size_t n) {
    std::vector<Coalition> cs;
    for (std::size_t a = 0; a < n; ++a) cs.emplace_back(AgentMask{1} << a);
    return {n, std::move(cs)};
  }

  /// Parses "{1,3}|{2,4}" (1-based members).
  static CoalitionStructure parse(std::string_view text, std::size_t n_agents) {
    std::vector<Coalition> out;
    std::size_t i = 0;
    auto bad = [&](const std::string& why) { detail::fail(Errc::ParseError, "'" + std::string(text) + "': " + why); };
    while (i < text.size()) {
      if (text[i] != '{') bad("expected '{'");
      ++i;
      AgentMask m = 0;
      while (true) {
        std::size_t j = i;
        while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
        if (j == i) bad("expected agent number");
        const auto agent = std::stoul(std::string(text.substr(i, j - i)));
        if (agent < 1 || agent > n_agents) bad("agent number out of range");
        if (m & (AgentMask{1} << (agent - 1))) bad("duplicate agent");
        m |= AgentMask{1} << (agent - 1);
        i = j;
        if (i < text.size() && text[i] == ',') {
          ++i;
          continue;
        }
        if (i < text.size() && text[i] == '}') {
          ++i;
          break;
        }
        bad("expected ',' or '}'");
      }
      out.emplace_back(m);
      if (i < text.size()) {
        if (text[i] != '|') bad("expected '|'");
        ++i;
        if (i == text.size()) bad("trailing '|'");
      }
    }
    if (out.empty()) bad("empty structure");
    try {
      return {n_agents, std::move(out)};
    } catch (const Error& e) {
      detail::fail(Errc::ParseError, "'" + std::string(text) + "': " + e.what());
    }
  }

  [[nodiscard]] std::size_t n_agents() const noexcept { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return coalitions_.size(); }
  [[nodiscard]] const std::vector<Coalition>& coalitions() const noexcept { return coalitions_; }
  [[nodiscard]] const Coalition& operator[](std::size_t i) const { return coalitions_.at(i); }

  [[nodiscard]] bool is_grand() const noexcept { return coalitions_.size() == 1; }
  [[nodiscard]] bool is_singletons() const noexcept { return coalitions_.size() == n_; }

  /// Index of the coalition holding `agent`.
  [[nodiscard]] std::size_t coalition_of(std::size_t agent) const {
    for (std::size_t i = 0; i < coalitions_.size(); ++i)
      if (coalitions_[i].contains(agent)) return i;
    detail::fail(Errc::BadAgentIndex, "agent " + std::to_string(agent) + " not in structure");
  }

  [[nodiscard]] bool contains(const Coalition& c) const {
    return std::find(coalitions_.begin(), coalitions_.end(), c) != coalitions_.end();
  }

  [[nodiscard]] std::string key() const {
    std::string s;
    for (std::size_t i = 0; i < coalitions_.size(); ++i) {
      if (i) s += '|';
      s += coalitions_[i].key();
    }
    return s;
  }

  friend bool operator==(const CoalitionStructure& a, const CoalitionStructure& b) {
    return a.n_ == b.n_ && a.coalitions_ == b.coalitions_;
  }

  static constexpr AgentMask full_mask(std::size_t n) noexcept {
    return n >= 32 ? ~AgentMask{0} : (AgentMask{1} << n) - 1;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Coalition> coalitions_;
};

/// Structures ordered by level (number of coalitions), then by key.
inline std::vector<CoalitionStructure> enumerate_structures(const AgentSet& agents) {
  const std::size_t n = agents.size();
  detail::require(n <= kMaxAgents, Errc::AgentCountTooLarge,
                  std::to_string(n) + " agents exceeds the limit of " + std::to_string(kMaxAgents));

  std::vector<std::pair<std::size_t, std::string>> order;
  std::vector<CoalitionStructure> all;

  // Restricted growth strings: block[i] <= 1 + max(block[0..i-1]).
  std::vector<std::size_t> block(n, 0);
  std::vector<std::size_t> prefix_max(n, 0);
  while (true) {
    const std::size_t blocks = prefix_max[n - 1] + 1;
    std::vector<AgentMask> masks(blocks, 0);
    for (std::size_t a = 0; a < n; ++a) masks[block[a]] |= AgentMask{1} << a;
    std::vector<Coalition> cs;
    cs.reserve(blocks);
    for (auto m : masks) cs.emplace_back(m);
    all.emplace_back(n, std::move(cs));

    std::size_t i = n - 1;
    while (i > 0 && block[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) break;
    ++block[i];
    prefix_max[i] = std::max(prefix_max[i - 1], block[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      block[j] = 0;
      prefix_max[j] = prefix_max[j - 1];
    }
  }

  std::vector<std::size_t> idx(all.size());
  std::vector<std::string> keys(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    idx[i] = i;
    keys[i] = all[i].key();
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (all[a].size() != all[b].size()) return all[a].size() < all[b].size();
    return keys[a] < keys[b];
  });
  std::vector<CoalitionStructure> out;
  out.reserve(all.size());
  for (auto i : idx) out.push_back(std::move(all[i]));
  return out;
}

/// True iff every coalition of `coarse` is a union of coalitions of `fine`.
inline bool is_refinement(const CoalitionStructure& fine, const CoalitionStructure& coarse) {
  detail::require(fine.n_agents() == coarse.n_agents(), Errc::MismatchedAgentSets,
                  "structures over different agent sets");
  for (const auto& c : fine.coalitions()) {
    const bool inside = std::any_of(coarse.coalitions().begin(), coarse.coalitions().end(),
                                    [&](const Coalition& d) { return c.subset_of(d); });
    if (!inside) return false;
  }
  return true;
}

struct CSGraph {
  std::vector<CoalitionStructure> nodes;
  /// (coarser, finer) node indices.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::map<std::string, std::size_t> index;

  [[nodiscard]] std::size_t level(std::size_t node) const { return nodes.at(node).size(); }

  [[nodiscard]] std::size_t find(const CoalitionStructure& cs) const {
    auto it = index.find(cs.key());
    detail::require(it != index.end() && cs.n_agents() == nodes.front().n_agents(), Errc::UnknownStructure,
                    "structure " + cs.key() + " not in graph");
    return it->second;
  }
};

namespace detail {

/// All structures obtained from `cs` by splitting coalition `which` into two.
inline std::vector<CoalitionStructure> splits_of(const CoalitionStructure& cs, std::size_t which) {
  std::vector<CoalitionStructure> out;
  const AgentMask m = cs[which].mask();
  if (std::popcount(m) < 2) return out;
  const AgentMask low = m & (~m + 1);
  const AgentMask rest = m & ~low;
  // Every proper nonempty subset of `rest` joined with `low` gives one unordered split.
  for (AgentMask sub = (rest - 1) & rest;; sub = (sub - 1) & rest) {
    const AgentMask part = low | sub;
    std::vector<Coalition> cols;
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (i != which) cols.push_back(cs[i]);
    cols.emplace_back(part);
    cols.emplace_back(m & ~part);
    out.emplace_back(cs.n_agents(), std::move(cols));
    if (sub == 0) break;
  }
  return out;
}

}  // namespace detail

inline CSGraph build_graph(const AgentSet& agents) {
  CSGraph g;
  g.nodes = enumerate_structures(agents);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) g.index.emplace(g.nodes[i].key(), i);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& cs = g.nodes[i];
    for (std::size_t c = 0; c < cs.size(); ++c)
      for (const auto& finer : detail::splits_of(cs, c)) g.edges.emplace_back(i, g.index.at(finer.key()));
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

/// All structures strictly coarser than `cs` (brute-force refinement checks).
inline std::vector<CoalitionStructure> coarsenings_of(const CoalitionStructure& cs, const CSGraph& graph) {
  const std::size_t self = graph.find(cs);
  std::vector<CoalitionStructure> out;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i)
    if (i != self && is_refinement(cs, graph.nodes[i])) out.push_back(graph.nodes[i]);
  return out;
}

/// |CS| x |A| 0/1 matrix; row i selects the members of the i-th coalition.
inline std::vector<std::vector<int>> aggregation_map(const CoalitionStructure& cs) {
  std::vector<std::vector<int>> m(cs.size(), std::vector<int>(cs.n_agents(), 0));
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (auto a : cs[i].members()) m[i][a] = 1;
  return m;
}

}  // namespace cpareto
