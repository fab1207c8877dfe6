#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mrmc/sim.hpp"
#include "mrmc/trace.hpp"

namespace {

int cmd_run(const std::string& scenario_path, const std::string& out_dir, const mrmc::RunOptions& options,
            std::optional<std::uint64_t> random_seed) {
  mrmc::Scenario sc = random_seed ? mrmc::random_scenario(*random_seed) : mrmc::load_scenario_file(scenario_path);
  const mrmc::RunResult result = mrmc::run(sc, options);
  mrmc::write_trace(result, out_dir);
  const mrmc::RunSummary& s = result.summary;
  std::cout << "status " << mrmc::to_string(s.status) << " at t=" << s.end_time << " after " << s.ticks
            << " ticks, " << s.conflict_pairs.size() << " conflict pairs, " << s.rounds << " coordination rounds\n";
  for (const mrmc::RobotSummary& r : s.robots) {
    std::cout << "  robot " << r.id << ": ";
    if (r.completion_time) {
      std::cout << "done at " << *r.completion_time;
    } else {
      std::cout << "not done";
    }
    std::cout << ", replans " << r.replanning_instants.size() << ", emergencies " << r.emergencies << "\n";
  }
  if (s.violation) std::cout << "safety violation: " << mrmc::to_string(*s.violation) << "\n";
  return static_cast<int>(s.status);
}

int cmd_replay(const std::string& dir) {
  const mrmc::ReplayReport report = mrmc::replay(dir);
  std::cout << report.rows << " rows checked\n";
  for (const std::string& v : report.limit_violations) std::cout << "limit violation: " << v << "\n";
  if (report.violation) std::cout << "safety violation: " << mrmc::to_string(*report.violation) << "\n";
  if (report.violation || !report.limit_violations.empty()) return 2;
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-robot motion coordination simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::optional<double> max_time;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> random_seed;
  std::string assert_safety = "on";
  CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write traces");
  run->add_option("scenario", scenario_path, "Scenario JSON file");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--max-time", max_time, "Override the scenario's max time [s]");
  run->add_option("--dt", dt, "Override the control period [s]");
  run->add_option("--seed", seed, "Seed recorded with the run");
  run->add_option("--random", random_seed, "Generate a random scenario from this seed instead of reading a file");
  run->add_option("--assert-safety", assert_safety, "Stop on the first safety violation")
      ->check(CLI::IsMember({"on", "off"}));

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", validate_path)->required();

  std::string replay_dir;
  CLI::App* replay = app.add_subcommand("replay", "Re-check limits and safety from a trace directory");
  replay->add_option("dir", replay_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (scenario_path.empty() && !random_seed) throw CLI::RequiredError("scenario or --random");
      mrmc::RunOptions options;
      options.max_time = max_time;
      options.dt = dt;
      options.seed = seed;
      options.assert_safety = assert_safety == "on";
      return cmd_run(scenario_path, out_dir, options, random_seed);
    }
    if (*validate) {
      const mrmc::Scenario sc = mrmc::load_scenario_file(validate_path);
      std::cout << "valid: " << sc.robots.size() << " robots, R=" << sc.sensing_radius << ", cell "
                << sc.cell_size << "\n";
      return 0;
    }
    if (*replay) return cmd_replay(replay_dir);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
