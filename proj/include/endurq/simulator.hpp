#ifndef ENDURQ_SIMULATOR_HPP
#define ENDURQ_SIMULATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "endurq/growth.hpp"
#include "endurq/heatmap.hpp"
#include "endurq/metrics.hpp"
#include "endurq/product_form.hpp"
#include "endurq/queue.hpp"
#include "endurq/workload.hpp"

namespace endurq {

struct ServiceTime {
    enum class Kind { deterministic, exponential };
    Kind kind = Kind::deterministic;
    double value = 0.0; // fixed seconds, or the mean for exponential
};

struct SystemConfig {
    std::string system_id;
    ServiceTime service_time;
    std::uint64_t d_m = 1; // degree of multiprogramming = parallel virtual servers
};

// Full description of one run. The simulation is a pure function of
// this struct: identical configs (seed included) give byte-identical
// reports.
struct SimConfig {
    std::vector<SystemConfig> systems; // pipeline order; >= 2 entries
    WorkloadProfile workload;
    double bucket_width = 1.0;
    std::uint64_t cap = kDefaultCap;
    std::size_t partition_k = 2;
    GrowthOn growth_on = GrowthOn::density_drop;
    std::uint64_t seed = 0;

    // Monitor and model tuning. Defaults pin the artifact-wide
    // conventions; all are overridable from the JSON config.
    std::uint64_t quantize_levels = 4;
    double d_max = 1.0;
    double eps_release = 0.01;
    double theta = 2.0;
    double warmup_fraction = 0.10;
    std::size_t monitor_max_steps = 64;
    double peak_quantile = 0.9;
    bool migrate_reset = false;
};

// Raw per-system, per-bucket accumulators the engine collects while it
// runs. Windowed SystemMetrics are derived from these.
struct SystemAccounting {
    std::string system_id;
    std::uint64_t servers = 1;
    std::vector<std::uint64_t> arrivals;    // per bucket
    std::vector<std::uint64_t> completions; // per bucket
    std::vector<double> busy_time;          // busy-server-seconds per bucket
    std::vector<double> service_time_sum;   // per bucket, over completions
};

struct RunAccounting {
    std::vector<SystemAccounting> systems;
    double bucket_width = 1.0;
    std::size_t buckets = 0;
};

struct SimReport {
    std::vector<SystemMetrics> per_system;
    std::vector<CapacityScore> capacities;
    HeatMap heatmap;
    QueueStats queue_stats;
    std::vector<SpawnPlan> spawn_plans;
    double end_to_end_throughput = 0.0;
    double mean_latency = 0.0;

    // Flow accounting for conservation checks.
    std::uint64_t generated = 0;
    std::uint64_t completed = 0;
    std::uint64_t dropped = 0;
    std::uint64_t in_flight = 0;
};

// Metrics for buckets [first_bucket, last_bucket) of a run:
// p = completions/window, u = busy/(servers*window) clamped to [0,1],
// D = busy/completions (0 with no completions), dt = arrivals per
// bucket, S = mean observed service time.
std::vector<SystemMetrics> collect_metrics(const RunAccounting& acct,
                                           std::size_t first_bucket,
                                           std::size_t last_bucket);

enum class QueuePolicy { endurance, fixed_depth };

// Single-threaded deterministic event loop over virtual time:
//   1. the warm-up window (warmup_fraction of the duration) runs with
//      plain unbounded buffers and collects SystemMetrics,
//   2. aggregate_stack + compute_capacity + partition_systems,
//   3. build_heatmap + select_queue_position install the endurance
//      queue in front of the boundary's choking stage,
//   4. per event, enqueue/dequeue around downstream service; at every
//      bucket boundary monitor_step drives apply_growth,
//   5. per bucket, apply_multiprogram records spawn plans when any
//      d_m > 1,
//   6. the report is emitted.
// Overload is reported, never fatal. Throws std::invalid_argument on
// configuration errors only.
SimReport run_simulation(const SimConfig& cfg,
                         QueuePolicy policy = QueuePolicy::endurance);

struct BaselineComparison {
    SimReport endurance;
    SimReport fixed;
};

// The same seeded workload through both arms: the endurance policy and
// a fixed depth-1 queue at the same placement. Drop counts are then
// directly comparable.
BaselineComparison compare_baseline(const SimConfig& cfg);

// Validate a config the way the CLI does; returns a message naming the
// offending field, or an empty string when the config is valid.
std::string validate_config(const SimConfig& cfg);

} // namespace endurq

#endif
