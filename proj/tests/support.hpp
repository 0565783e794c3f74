#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "cpareto.hpp"

namespace testsupport {

inline std::string fixture(const std::string& name) { return std::string(CPARETO_FIXTURE_DIR) + "/" + name; }

inline const cpareto::Scenario& scenario(const std::string& name) {
  static std::map<std::string, cpareto::Scenario> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, cpareto::load_scenario(fixture(name))).first;
  return it->second;
}

// Linear bottom-up run of a fixture, cached per (fixture, grid).
inline const cpareto::StrategyResult& linear_run(const std::string& name, std::size_t grid = 0,
                                                 cpareto::StrategyKind kind = cpareto::StrategyKind::BottomUp) {
  static std::map<std::string, std::unique_ptr<cpareto::StrategyResult>> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  const auto key = name + "/" + std::to_string(grid) + "/" + cpareto::to_string(kind);
  auto it = cache.find(key);
  if (it == cache.end()) {
    cpareto::PhysicsModel model(scenario(name));
    cpareto::SweepOptions opt;
    opt.resolution = grid;
    it = cache.emplace(key, std::make_unique<cpareto::StrategyResult>(cpareto::run_linear_strategy(model, kind, opt)))
             .first;
  }
  return *it->second;
}

inline cpareto::CoalitionStructure cs(const std::string& key, std::size_t n) {
  return cpareto::CoalitionStructure::parse(key, n);
}

}  // namespace testsupport
