#ifndef ENDURQ_SERDE_HPP
#define ENDURQ_SERDE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "endurq/metrics.hpp"
#include "endurq/queue.hpp"
#include "endurq/simulator.hpp"

namespace endurq {

using json = nlohmann::json;

json to_json(const CapacityScore& score);
json to_json(const DisjointPartition& part);
json to_json(const QueueStats& stats); // keys: enqueued, dequeued, dropped, migrations, max_depth_seen
json to_json(const SystemMetrics& m);
json to_json(const SpawnPlan& plan);
json to_json(const SimReport& report);

std::string depth_timeline_csv(const QueueStats& stats); // "time,depth" rows

// Metrics CSV: header "system_id,p,u,D,dt,S,window_start,window_end".
std::vector<SystemMetrics> read_metrics_csv(std::istream& in);
void write_metrics_csv(const std::vector<SystemMetrics>& rows, std::ostream& out);

// Parse and validate a SimConfig document. Unknown keys and invariant
// violations throw ConfigError with a message naming the field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

SimConfig parse_sim_config(const json& doc);
SimConfig load_sim_config(const std::string& path); // throws IoError / ConfigError

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace endurq

#endif
