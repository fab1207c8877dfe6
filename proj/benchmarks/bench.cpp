#include <benchmark/benchmark.h>

#include <string>

#include "mrmc/sim.hpp"
#include "mrmc/spacetime.hpp"

namespace {

using namespace mrmc;

const Limits kLimits{2, 115, 2, 115};

void BM_SpeedProfile(benchmark::State& state) {
  const LatticeSpec lat = LatticeSpec::make(kLimits, 0.05, 0.1);
  const Workspace ws({0, 0, 10, 4}, {}, 0.5);
  const std::vector<Vec2> wp{{4.75, 1.75}, {8.75, 2.75}};
  const Path path = make_path({0.75, 1.75}, 0.0, wp, lat);
  WindowMap windows;
  for (int k = 0; k < state.range(0); ++k) windows[{3 + k, 3}].insert({0.5 * k, 0.5 * k + 1.0});
  PlanStart start;
  start.prefix = Trajectory(0.0, lat.dt);
  start.prefix.push_back({0.75, 1.75, 0, 0, 0});
  for (auto _ : state) {
    SpeedProfiler p(path, lat, 0.2, ws.grid(), windows, 0.0);
    benchmark::DoNotOptimize(p.solve({0, 0, 0, path.legs.front().rotation_steps > 0, true}));
  }
}
BENCHMARK(BM_SpeedProfile)->Arg(0)->Arg(4)->Arg(8);

void BM_SpaceTimeSearch(benchmark::State& state) {
  const LatticeSpec lat = LatticeSpec::make(kLimits, 0.05, 0.1);
  const Workspace ws({0, 0, 10, 5}, {{2, 1.5, 8, 3.5}}, 0.5);
  WindowMap windows;
  for (int col = 8; col < 12; ++col) {
    for (int row = 0; row < 3; ++row) windows[{col, row}].insert({0.0, static_cast<double>(state.range(0))});
  }
  for (auto _ : state) {
    SpaceTimeLattice lattice(ws, lat, 0.2, windows, 0.0, {0.75, 0.75}, {9.25, 0.75});
    benchmark::DoNotOptimize(space_time_search(lattice, 0.0));
  }
}
BENCHMARK(BM_SpaceTimeSearch)->Arg(2)->Arg(10);

void BM_SevenRobotRun(benchmark::State& state) {
  const Scenario sc = load_scenario_file(std::string(MRMC_SCENARIO_DIR) + "/seven_robots.json");
  for (auto _ : state) benchmark::DoNotOptimize(run(sc));
}
BENCHMARK(BM_SevenRobotRun)->Unit(benchmark::kMillisecond);

void BM_RandomRun(benchmark::State& state) {
  const Scenario sc = random_scenario(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run(sc));
}
BENCHMARK(BM_RandomRun)->Arg(1)->Arg(42)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
