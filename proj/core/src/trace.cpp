#include "mrmc/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mrmc/format.hpp"

namespace mrmc {

namespace {

// Details may carry interval text; keep the CSV one field per column.
std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ' ');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw TraceIoError("bad number '" + std::string(s) + "'");
  return v;
}

int parse_int(std::string_view s) {
  int v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw TraceIoError("bad integer '" + std::string(s) + "'");
  return v;
}

Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::Free, Mode::Busy, Mode::Emerg}) {
    if (s == to_string(m)) return m;
  }
  throw TraceIoError("bad mode '" + std::string(s) + "'");
}

Lifecycle parse_lifecycle(std::string_view s) {
  for (Lifecycle l : {Lifecycle::Inactive, Lifecycle::Active, Lifecycle::Passive}) {
    if (s == to_string(l)) return l;
  }
  throw TraceIoError("bad lifecycle '" + std::string(s) + "'");
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceIoError("cannot write " + path.string());
  out << text;
  if (!out) throw TraceIoError("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceIoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string trace_csv(const std::vector<TraceRecord>& records) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const TraceRecord& r : records) {
    out += format_time(r.t) + "," + std::to_string(r.id) + "," + format_number(r.state.x) + "," +
           format_number(r.state.y) + "," + format_number(r.state.theta) + "," + format_number(r.state.v) + "," +
           format_number(r.state.omega) + "," + format_number(r.input.F) + "," + format_number(r.input.tau) + "," +
           to_string(r.mode) + "," + to_string(r.lifecycle) + "\n";
  }
  return out;
}

std::string events_csv(const std::vector<Event>& events) {
  std::string out = std::string(kEventHeader) + "\n";
  for (const Event& e : events) {
    out += format_time(e.t) + "," + sanitize(e.kind) + "," + (e.robot >= 0 ? std::to_string(e.robot) : "") + "," +
           (e.peer >= 0 ? std::to_string(e.peer) : "") + "," + sanitize(e.detail) + "\n";
  }
  return out;
}

nlohmann::json summary_json(const RunSummary& s) {
  using nlohmann::json;
  json robots = json::array();
  for (const RobotSummary& r : s.robots) {
    json instants = json::array();
    for (double t : r.replanning_instants) instants.push_back(format_time(t));
    robots.push_back({
        {"id", r.id},
        {"completed", r.completion_time.has_value()},
        {"completion_time", r.completion_time ? json(format_time(*r.completion_time)) : json(nullptr)},
        {"replanning_instants", instants},
        {"outcomes", r.outcomes},
        {"emergencies", r.emergencies},
        {"recoveries", r.recoveries},
    });
  }
  json pairs = json::array();
  for (const auto& [a, b] : s.conflict_pairs) pairs.push_back({a, b});
  json out = {
      {"scenario", s.scenario},
      {"seed", s.seed},
      {"status", to_string(s.status)},
      {"exit_code", static_cast<int>(s.status)},
      {"end_time", format_time(s.end_time)},
      {"ticks", s.ticks},
      {"conflict_pairs", pairs},
      {"coordination_rounds", s.rounds},
      {"max_stages", s.max_stages},
      {"robots", robots},
  };
  if (s.violation) out["violation"] = to_string(*s.violation);
  return out;
}

void write_trace(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw TraceIoError("cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [id, records] : result.traces) {
    write_file(dir / ("robot_" + std::to_string(id) + ".csv"), trace_csv(records));
  }
  write_file(dir / "events.csv", events_csv(result.events));
  write_file(dir / "summary.json", summary_json(result.summary).dump(2) + "\n");
  write_file(dir / "scenario.json", to_json(result.scenario).dump(2) + "\n");
}

std::vector<TraceRecord> parse_trace(const std::string& text) {
  std::vector<TraceRecord> out;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw TraceIoError("missing trace header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 11) throw TraceIoError("trace row needs 11 fields: " + line);
    TraceRecord r;
    r.t = parse_double(f[0]);
    r.id = parse_int(f[1]);
    r.state = {parse_double(f[2]), parse_double(f[3]), parse_double(f[4]), parse_double(f[5]), parse_double(f[6])};
    r.input = {parse_double(f[7]), parse_double(f[8])};
    r.mode = parse_mode(f[9]);
    r.lifecycle = parse_lifecycle(f[10]);
    out.push_back(r);
  }
  return out;
}

std::map<int, std::vector<TraceRecord>> read_traces(const std::filesystem::path& dir) {
  std::map<int, std::vector<TraceRecord>> out;
  if (!std::filesystem::is_directory(dir)) throw TraceIoError("not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!name.starts_with("robot_") || !name.ends_with(".csv")) continue;
    std::vector<TraceRecord> rows = parse_trace(read_file(entry.path()));
    if (rows.empty()) continue;
    out[rows.front().id] = std::move(rows);
  }
  return out;
}

ReplayReport replay(const std::filesystem::path& dir) {
  const Scenario sc = load_scenario_file(dir / "scenario.json");
  const Workspace ws(sc.bounds, sc.obstacles, sc.cell_size);
  const auto traces = read_traces(dir);
  ReplayReport report;
  std::map<int, const RobotSpec*> specs;
  for (const RobotSpec& r : sc.robots) specs[r.id] = &r;

  std::size_t ticks = 0;
  for (const auto& [id, rows] : traces) {
    auto it = specs.find(id);
    if (it == specs.end()) throw TraceIoError("trace for unknown robot " + std::to_string(id));
    ticks = std::max(ticks, rows.size());
    for (const TraceRecord& r : rows) {
      ++report.rows;
      if (!check_limits(r.state, r.input, it->second->limits)) {
        report.limit_violations.push_back("robot " + std::to_string(id) + " at t=" + format_time(r.t));
      }
    }
  }
  for (std::size_t k = 0; k < ticks && !report.violation; ++k) {
    std::vector<SweptDisc> discs;
    double t0 = 0.0;
    for (const auto& [id, rows] : traces) {
      if (k >= rows.size()) continue;
      const Vec2 from = rows[k].state.position();
      const Vec2 to = k + 1 < rows.size() ? rows[k + 1].state.position() : from;
      discs.push_back({id, specs.at(id)->radius, from, to});
      t0 = rows[k].t;
    }
    report.violation = check_swept_safety(ws, discs, t0, k + 1 < ticks ? sc.dt : 0.0);
  }
  return report;
}

}  // namespace mrmc
