#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mrmc/agent.hpp"

namespace mrmc {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::string name;
  Rect bounds;
  std::vector<Rect> obstacles;
  double cell_size = 0.5;
  double dt = 0.05;
  double dt_plan = 0.1;
  double sensing_radius = 5.0;
  double max_time = 120.0;
  std::uint64_t seed = 0;
  EmergencyBraking braking = EmergencyBraking::MaxDecel;
  std::vector<RobotSpec> robots;
};

/// Parses and validates a JSON scenario document. Errors name the offending
/// field, e.g. "robots[2].base_priority: duplicate value 3".
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Throws ScenarioError on the first violated invariant.
void validate(const Scenario& scenario);

nlohmann::json to_json(const Scenario& scenario);

struct RandomScenarioOptions {
  int min_robots = 2;
  int max_robots = 8;
  double min_size = 10.0;
  double max_size = 20.0;
  int max_obstacles = 6;
  double radius = 0.2;
  double sensing_radius = 5.0;
  double cell_size = 0.5;
  Limits limits{2.0, 115.0, 2.0, 115.0};
  double max_time = 120.0;
};

/// Reproducible random instance: rectangular obstacles, robots with disjoint
/// starts and goals in free space, every goal reachable ignoring the others.
Scenario random_scenario(std::uint64_t seed, const RandomScenarioOptions& options = {});

}  // namespace mrmc
