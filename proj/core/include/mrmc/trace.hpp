#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mrmc/sim.hpp"

namespace mrmc {

class TraceIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kTraceHeader = "t,id,x,y,theta,v,omega,F,tau,mode,lifecycle";
inline constexpr const char* kEventHeader = "t,kind,robot,peer,detail";

std::string trace_csv(const std::vector<TraceRecord>& records);
std::string events_csv(const std::vector<Event>& events);
nlohmann::json summary_json(const RunSummary& summary);

/// Writes robot_<id>.csv per robot, events.csv, summary.json and a copy of
/// the scenario as scenario.json. Creates the directory if needed.
void write_trace(const RunResult& result, const std::filesystem::path& dir);

std::vector<TraceRecord> parse_trace(const std::string& text);
std::map<int, std::vector<TraceRecord>> read_traces(const std::filesystem::path& dir);

struct ReplayReport {
  std::size_t rows = 0;
  std::vector<std::string> limit_violations;
  std::optional<SafetyViolation> violation;

  [[nodiscard]] bool ok() const { return limit_violations.empty() && !violation; }
};

/// Recomputes the run's checks from the files alone: every row against the
/// robot's limits, and the footprints at 1 ms resolution between rows.
ReplayReport replay(const std::filesystem::path& dir);

}  // namespace mrmc
