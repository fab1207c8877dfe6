#include "mrmc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace mrmc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where, "must be finite");
  return d;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, where + "." + key);
}

Rect rect(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) fail(where, "expected [xmin, ymin, xmax, ymax]");
  Rect r{number(v[0], where + "[0]"), number(v[1], where + "[1]"), number(v[2], where + "[2]"),
         number(v[3], where + "[3]")};
  if (r.degenerate()) fail(where, "rectangle has no area");
  return r;
}

json rect_json(const Rect& r) { return json::array({r.xmin, r.ymin, r.xmax, r.ymax}); }

RobotSpec robot(const json& v, const std::string& where) {
  RobotSpec r;
  const json& id = field(v, "id", where);
  if (!id.is_number_integer()) fail(where + ".id", "expected an integer");
  r.id = id.get<int>();
  const json& prio = field(v, "base_priority", where);
  if (!prio.is_number_integer()) fail(where + ".base_priority", "expected an integer");
  r.base_priority = prio.get<int>();
  r.radius = number(field(v, "radius", where), where + ".radius");
  const json& lim = field(v, "limits", where);
  const std::string lw = where + ".limits";
  r.limits = {number(field(lim, "v_max", lw), lw + ".v_max"), number(field(lim, "omega_max", lw), lw + ".omega_max"),
              number(field(lim, "F_max", lw), lw + ".F_max"), number(field(lim, "tau_max", lw), lw + ".tau_max")};
  const json& s = field(v, "start", where);
  const std::string sw = where + ".start";
  r.start = {number(field(s, "x", sw), sw + ".x"), number(field(s, "y", sw), sw + ".y"),
             number_or(s, "theta", 0.0, sw), number_or(s, "v", 0.0, sw), number_or(s, "omega", 0.0, sw)};
  r.goal = rect(field(v, "goal", where), where + ".goal");
  r.activation_time = number_or(v, "activation_time", 0.0, where);
  return r;
}

}  // namespace

void validate(const Scenario& sc) {
  if (sc.bounds.degenerate()) fail("workspace.bounds", "rectangle has no area");
  if (!(sc.cell_size > 0.0)) fail("workspace.cell_size", "must be positive");
  for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
    if (!sc.bounds.contains(sc.obstacles[i])) {
      fail("workspace.obstacles[" + std::to_string(i) + "]", "outside the bounds");
    }
  }
  if (!(sc.dt > 0.0)) fail("dt", "must be positive");
  if (!(sc.sensing_radius > 0.0)) fail("sensing_radius", "must be positive");
  if (!(sc.max_time > 0.0)) fail("max_time", "must be positive");
  if (sc.robots.empty()) fail("robots", "at least one robot is required");

  const Workspace ws(sc.bounds, sc.obstacles, sc.cell_size);
  std::set<int> ids;
  std::set<int> priorities;
  for (std::size_t i = 0; i < sc.robots.size(); ++i) {
    const RobotSpec& r = sc.robots[i];
    const std::string where = "robots[" + std::to_string(i) + "]";
    if (!ids.insert(r.id).second) fail(where + ".id", "duplicate value " + std::to_string(r.id));
    if (r.base_priority <= 0) fail(where + ".base_priority", "must be a positive integer");
    if (!priorities.insert(r.base_priority).second) {
      fail(where + ".base_priority", "duplicate value " + std::to_string(r.base_priority));
    }
    if (!(r.radius >= 0.0) || !(r.radius < sc.sensing_radius)) {
      fail(where + ".radius", "must lie in [0, sensing_radius)");
    }
    if (!r.limits.valid()) fail(where + ".limits", "all limits must be positive");
    try {
      (void)LatticeSpec::make(r.limits, sc.dt, sc.dt_plan);
    } catch (const std::invalid_argument& e) {
      fail(where + ".limits", e.what());
    }
    if (r.start.v != 0.0 || r.start.omega != 0.0) fail(where + ".start", "robots start at rest");
    if (!ws.is_region_free(Disc{r.start.position(), r.radius})) {
      fail(where + ".start", "footprint is not in free space");
    }
    if (!sc.bounds.contains(r.goal)) fail(where + ".goal", "outside the bounds");
    if (r.activation_time < 0.0) fail(where + ".activation_time", "must be non-negative");
    for (std::size_t j = 0; j < i; ++j) {
      const RobotSpec& o = sc.robots[j];
      if (distance(r.start.position(), o.start.position()) <= r.radius + o.radius) {
        fail(where + ".start", "footprint overlaps robots[" + std::to_string(j) + "]");
      }
    }
  }
}

Scenario load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) fail("$", "expected an object");
  Scenario sc;
  if (auto it = doc.find("name"); it != doc.end() && it->is_string()) sc.name = it->get<std::string>();
  const json& ws = field(doc, "workspace", "$");
  sc.bounds = rect(field(ws, "bounds", "workspace"), "workspace.bounds");
  sc.cell_size = number(field(ws, "cell_size", "workspace"), "workspace.cell_size");
  if (auto it = ws.find("obstacles"); it != ws.end()) {
    if (!it->is_array()) fail("workspace.obstacles", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      sc.obstacles.push_back(rect((*it)[i], "workspace.obstacles[" + std::to_string(i) + "]"));
    }
  }
  sc.dt = number_or(doc, "dt", sc.dt, "$");
  sc.dt_plan = number_or(doc, "dt_plan", sc.dt_plan, "$");
  sc.sensing_radius = number(field(doc, "sensing_radius", "$"), "sensing_radius");
  sc.max_time = number_or(doc, "max_time", sc.max_time, "$");
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer()) fail("seed", "expected an integer");
    sc.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("emergency_braking"); it != doc.end()) {
    const std::string mode = it->is_string() ? it->get<std::string>() : "";
    if (mode == "max_decel") {
      sc.braking = EmergencyBraking::MaxDecel;
    } else if (mode == "immediate") {
      sc.braking = EmergencyBraking::Immediate;
    } else {
      fail("emergency_braking", "expected \"max_decel\" or \"immediate\"");
    }
  }
  const json& robots = field(doc, "robots", "$");
  if (!robots.is_array()) fail("robots", "expected an array");
  for (std::size_t i = 0; i < robots.size(); ++i) sc.robots.push_back(robot(robots[i], "robots[" + std::to_string(i) + "]"));
  validate(sc);
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

json to_json(const Scenario& sc) {
  json obstacles = json::array();
  for (const Rect& r : sc.obstacles) obstacles.push_back(rect_json(r));
  json robots = json::array();
  for (const RobotSpec& r : sc.robots) {
    robots.push_back({
        {"id", r.id},
        {"base_priority", r.base_priority},
        {"radius", r.radius},
        {"limits", {{"v_max", r.limits.v_max}, {"omega_max", r.limits.omega_max},
                    {"F_max", r.limits.F_max}, {"tau_max", r.limits.tau_max}}},
        {"start", {{"x", r.start.x}, {"y", r.start.y}, {"theta", r.start.theta}, {"v", r.start.v},
                   {"omega", r.start.omega}}},
        {"goal", rect_json(r.goal)},
        {"activation_time", r.activation_time},
    });
  }
  return {
      {"name", sc.name},
      {"workspace", {{"bounds", rect_json(sc.bounds)}, {"obstacles", obstacles}, {"cell_size", sc.cell_size}}},
      {"dt", sc.dt},
      {"dt_plan", sc.dt_plan},
      {"sensing_radius", sc.sensing_radius},
      {"max_time", sc.max_time},
      {"seed", sc.seed},
      {"emergency_braking", sc.braking == EmergencyBraking::MaxDecel ? "max_decel" : "immediate"},
      {"robots", robots},
  };
}

Scenario random_scenario(std::uint64_t seed, const RandomScenarioOptions& opt) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto integer = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto snap = [](double v) { return std::round(v * 10.0) / 10.0; };

  Scenario sc;
  sc.name = "random-" + std::to_string(seed);
  sc.seed = seed;
  sc.cell_size = opt.cell_size;
  sc.sensing_radius = opt.sensing_radius;
  sc.max_time = opt.max_time;
  const double w = std::round(uniform(opt.min_size, opt.max_size) * 2.0) / 2.0;
  const double h = std::round(uniform(opt.min_size, opt.max_size) * 2.0) / 2.0;
  sc.bounds = {0.0, 0.0, w, h};
  const int obstacles = integer(0, opt.max_obstacles);
  for (int i = 0; i < obstacles; ++i) {
    const double ow = snap(uniform(0.5, 0.2 * w));
    const double oh = snap(uniform(0.5, 0.2 * h));
    const double x = snap(uniform(1.0, w - ow - 1.0));
    const double y = snap(uniform(1.0, h - oh - 1.0));
    sc.obstacles.push_back({x, y, x + ow, y + oh});
  }
  const Workspace ws(sc.bounds, sc.obstacles, sc.cell_size);
  const LatticeSpec lattice = LatticeSpec::make(opt.limits, sc.dt, sc.dt_plan);
  const double r = opt.radius;
  const double goal_size = std::max(1.0, 4.0 * r + 0.2);

  const int n = integer(opt.min_robots, opt.max_robots);
  std::vector<int> priorities(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) priorities[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(priorities.begin(), priorities.end(), rng);

  for (int i = 0; i < n; ++i) {
    for (int attempt = 0; attempt < 400; ++attempt) {
      RobotSpec spec;
      spec.id = i + 1;
      spec.base_priority = priorities[static_cast<std::size_t>(i)];
      spec.radius = r;
      spec.limits = opt.limits;
      spec.start = {snap(uniform(r + 0.3, w - r - 0.3)), snap(uniform(r + 0.3, h - r - 0.3)),
                    snap(uniform(-3.1, 3.1)), 0.0, 0.0};
      const double gx = snap(uniform(0.2, w - goal_size - 0.2));
      const double gy = snap(uniform(0.2, h - goal_size - 0.2));
      spec.goal = {gx, gy, gx + goal_size, gy + goal_size};
      const Vec2 p = spec.start.position();
      if (!ws.is_region_free(Disc{p, r + 0.3})) continue;
      if (footprint_inside(spec.goal, p, r)) continue;
      bool clash = false;
      for (const RobotSpec& o : sc.robots) {
        const Vec2 q = o.start.position();
        clash = clash || distance(p, q) < 2.0 * r + 0.8 || o.goal.inflated(0.6).intersects(spec.goal) ||
                distance(q, spec.goal) <= r + 0.3 || distance(p, o.goal) <= r + 0.3;
      }
      if (clash) continue;
      PlannerConfig config{lattice, r, {}, {}};
      const auto g = goal_point(ws, spec.goal, r);
      if (!g || !ws.is_region_free(Disc{*g, r + 0.3})) continue;
      try {
        (void)initial_plan(ws, spec.start, spec.goal, config, 0.0);
      } catch (const InfeasibleError&) {
        continue;
      }
      sc.robots.push_back(spec);
      break;
    }
  }
  // Dropped robots leave gaps in the priority order; renumber densely.
  std::vector<int> used;
  for (const RobotSpec& s : sc.robots) used.push_back(s.base_priority);
  std::sort(used.begin(), used.end());
  for (RobotSpec& s : sc.robots) {
    s.base_priority = static_cast<int>(std::lower_bound(used.begin(), used.end(), s.base_priority) - used.begin()) + 1;
  }
  validate(sc);
  return sc;
}

}  // namespace mrmc
