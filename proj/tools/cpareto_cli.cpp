// cpareto: command-line driver.
//
//   cpareto partitions N [--format text|json]
//   cpareto solve --scenario FILE [--method linear|evolutionary] [--strategy S] --out BUNDLE
//   cpareto analyze BUNDLE [--criterion utopia|favor] [--beta 1/3,1/3,1/3] [--p 2] [--agent 1]
//                          [--eta 1] [--deviations single,pair] [--format text|json] [--out FILE]
//   cpareto export-fronts BUNDLE [--format csv|json] [--out-dir DIR]
//
// Exit codes: 0 success, 2 invalid input, 3 no feasible point found.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpareto.hpp"

namespace {

using namespace cpareto;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitNoFeasible = 3;

// Accepts decimals and fractions such as "1/3".
double parse_weight(const std::string& tok) {
  const auto slash = tok.find('/');
  std::size_t used = 0;
  try {
    if (slash == std::string::npos) {
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    }
    const auto num = tok.substr(0, slash);
    const auto den = tok.substr(slash + 1);
    std::size_t u1 = 0;
    std::size_t u2 = 0;
    const double a = std::stod(num, &u1);
    const double b = std::stod(den, &u2);
    if (u1 != num.size() || u2 != den.size() || b == 0.0) throw std::invalid_argument(tok);
    return a / b;
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "bad weight '" + tok + "'");
  }
}

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find(',', pos), text.size());
    out.push_back(parse_weight(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

int cmd_partitions(int n, const std::string& format) {
  detail::require(n >= 1, Errc::InvalidArgument, "need at least one agent");
  const AgentSet agents(static_cast<std::size_t>(n));
  const auto g = build_graph(agents);
  if (format == "json") {
    ojson j;
    ojson nodes = ojson::array();
    for (const auto& cs : g.nodes) nodes.push_back({{"structure", cs.key()}, {"level", cs.size()}});
    ojson edges = ojson::array();
    for (const auto& [a, b] : g.edges) edges.push_back({g.nodes[a].key(), g.nodes[b].key()});
    j["agents"] = n;
    j["structures"] = nodes;
    j["edges"] = edges;
    std::cout << j.dump(1) << "\n";
    return kExitOk;
  }
  std::cout << g.nodes.size() << " structures, " << g.edges.size() << " edges\n";
  std::size_t level = 0;
  for (const auto& cs : g.nodes) {
    if (cs.size() != level) {
      level = cs.size();
      std::cout << "level " << level << ":\n";
    }
    std::cout << "  " << cs.key() << "\n";
  }
  std::cout << "edges:\n";
  for (const auto& [a, b] : g.edges) std::cout << "  " << g.nodes[a].key() << " -- " << g.nodes[b].key() << "\n";
  return kExitOk;
}

struct SolveArgs {
  std::string scenario;
  std::string method;
  std::string strategy;
  std::uint64_t seed = 1;
  std::size_t pop = 100;
  std::size_t gens = 100;
  std::size_t grid = 0;
  std::string out;
};

int cmd_solve(const SolveArgs& a) {
  const auto scenario = load_scenario(a.scenario);
  const std::string method =
      a.method.empty() ? (scenario.model == ModelKind::Linear ? "linear" : "evolutionary") : a.method;
  detail::require(method == "linear" || method == "evolutionary", Errc::InvalidArgument,
                  "method must be linear or evolutionary");
  detail::require(method != "linear" || scenario.model == ModelKind::Linear, Errc::InvalidArgument,
                  "the linear method needs a linear scenario");
  const auto kind = a.strategy.empty() ? (method == "linear" ? StrategyKind::BottomUp : StrategyKind::TopDown)
                                       : parse_strategy(a.strategy);

  PhysicsModel model(scenario);
  RunBundle b;
  b.scenario = scenario;
  b.method = method;
  b.strategy = to_string(kind);
  StrategyResult r;
  if (method == "linear") {
    SweepOptions opt;
    opt.resolution = a.grid;
    b.seed = 0;
    b.config = {{"grid", a.grid}, {"weight_floor", opt.floor}, {"refine_two_objective", opt.refine_two_objective}};
    r = run_linear_strategy(model, kind, opt);
  } else {
    EvoConfig cfg;
    cfg.population = a.pop;
    cfg.generations = a.gens;
    cfg.seed = a.seed;
    b.seed = a.seed;
    b.config = {{"population", cfg.population},       {"generations", cfg.generations},
                {"crossover_rate", cfg.crossover_rate}, {"crossover_eta", cfg.crossover_eta},
                {"mutation_rate", cfg.mutation_rate},   {"mutation_eta", cfg.mutation_eta},
                {"extreme_eps", cfg.extreme_eps},       {"cso_phi", cfg.cso_phi},
                {"partial_fraction", cfg.partial_fraction}};
    r = run_strategy(model, kind, cfg);
  }
  b.budget = r.report;
  b.archives = std::move(r.archives);
  save_bundle(b, a.out);
  std::cerr << "wrote " << a.out << ": " << b.archives.size() << " structures, " << b.budget.total()
            << " model evaluations\n";
  return kExitOk;
}

struct AnalyzeArgs {
  std::string bundle;
  std::string criterion = "utopia";
  std::string beta;
  double p = 2.0;
  std::size_t agent = 1;
  double eta = 1.0;
  std::string deviations = "single,pair";
  bool full_precision = false;
  std::string format = "text";
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const auto b = load_bundle(a.bundle);
  const std::size_t n = b.scenario.n_agents();
  SelectionCriterion crit;
  if (a.criterion == "utopia") {
    std::vector<double> beta = a.beta.empty() ? std::vector<double>(n, 1.0 / static_cast<double>(n)) : parse_weights(a.beta);
    detail::require(beta.size() == n, Errc::LengthMismatch, "--beta needs one weight per agent");
    crit = UtopiaWeighted{beta, a.p};
  } else if (a.criterion == "favor") {
    detail::require(a.agent >= 1 && a.agent <= n, Errc::BadAgentIndex, "--agent must be between 1 and the agent count");
    crit = FavorAgent{a.agent - 1};
  } else {
    detail::fail(Errc::InvalidArgument, "criterion must be utopia or favor");
  }
  DeviationRule rule;
  rule.eta = a.eta;
  rule.compare_rounded = !a.full_precision;
  rule = parse_deviation_classes(a.deviations, rule);

  const auto report = analyze_game(b, crit, rule);
  const auto json_text = report_to_json(report).dump(1) + "\n";
  if (!a.out.empty()) write_text_file(a.out, json_text);
  if (a.format == "json")
    std::cout << json_text;
  else
    std::cout << render_report_text(report);
  return kExitOk;
}

int cmd_export(const std::string& bundle, const std::string& format, const std::string& dir) {
  detail::require(format == "csv" || format == "json", Errc::InvalidArgument, "format must be csv or json");
  const auto b = load_bundle(bundle);
  std::filesystem::create_directories(dir);
  for (const auto& ar : b.archives) {
    const auto path = (std::filesystem::path(dir) / ("front_" + structure_file_stem(ar.structure()) + "." + format)).string();
    write_text_file(path, format == "csv" ? front_to_csv(ar) : front_to_json(ar, b.scenario.agent_labels).dump(1) + "\n");
    std::cout << path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalition values from Pareto fronts"};
  app.require_subcommand(1);

  int n_agents = 0;
  std::string part_format = "text";
  auto* part = app.add_subcommand("partitions", "List coalition structures and the structure graph");
  part->add_option("n", n_agents, "Number of agents")->required();
  part->add_option("--format", part_format, "text or json")->check(CLI::IsMember({"text", "json"}));

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Compute the fronts of every coalition structure");
  solve->add_option("--scenario", sa.scenario, "Scenario JSON")->required();
  solve->add_option("--method", sa.method, "linear or evolutionary (default by scenario model)");
  solve->add_option("--strategy", sa.strategy, "nonnested, bottomup or topdown");
  solve->add_option("--seed", sa.seed, "Random seed (evolutionary)");
  solve->add_option("--pop", sa.pop, "Population size (evolutionary)");
  solve->add_option("--gens", sa.gens, "Generations (evolutionary)");
  solve->add_option("--grid", sa.grid, "Weight grid resolution (linear; 0 picks by dimension)");
  solve->add_option("--out", sa.out, "Output bundle")->required();

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Build and analyze the game of a bundle");
  analyze->add_option("bundle", aa.bundle, "Run bundle")->required();
  analyze->add_option("--criterion", aa.criterion, "utopia or favor");
  analyze->add_option("--beta", aa.beta, "Agent weights, e.g. 1/3,1/3,1/3");
  analyze->add_option("--p", aa.p, "Norm exponent");
  analyze->add_option("--agent", aa.agent, "Favored agent (1-based)");
  analyze->add_option("--eta", aa.eta, "Deviation margin");
  analyze->add_option("--deviations", aa.deviations, "Deviation classes: single,pair,subset");
  analyze->add_flag("--full-precision", aa.full_precision, "Compare unrounded payoffs in the stability check");
  analyze->add_option("--format", aa.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  analyze->add_option("--out", aa.out, "Also write the JSON report here");

  std::string ex_bundle;
  std::string ex_format = "csv";
  std::string ex_dir = ".";
  auto* exp = app.add_subcommand("export-fronts", "Write one table per coalition structure");
  exp->add_option("bundle", ex_bundle, "Run bundle")->required();
  exp->add_option("--format", ex_format, "csv or json");
  exp->add_option("--out-dir", ex_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (*part) return cmd_partitions(n_agents, part_format);
    if (*solve) return cmd_solve(sa);
    if (*analyze) return cmd_analyze(aa);
    if (*exp) return cmd_export(ex_bundle, ex_format, ex_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::NoFeasibleFound ? kExitNoFeasible : kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
