#ifndef ENDURQ_METRICS_HPP
#define ENDURQ_METRICS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace endurq {

// Half-open observation interval [start, end) in seconds.
struct Window {
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
    bool valid() const { return end > start; }
};

// Per-system observed rates over a window.
//   p  - throughput, items/second
//   u  - utilization in [0, 1]
//   D  - service demand, seconds per item
//   dt - data density, items per bucket window
//   S  - service time, seconds
struct SystemMetrics {
    std::string system_id;
    double p = 0.0;
    double u = 0.0;
    double D = 0.0;
    double dt = 0.0;
    double S = 0.0;
    Window window;
};

// Stack-wide totals. All three are divisors downstream, so they are
// required to be strictly positive.
struct StackTotals {
    double P = 0.0;       // end-to-end throughput, sum of per-system p
    double U = 0.0;       // end-to-end utilization, mean of per-system u
    double D_total = 0.0; // summed service demand
};

// Dimensionless ranking score for one system. Used only for ordering
// and for the r = C_i / C migration check.
struct CapacityScore {
    std::string system_id;
    double c = 0.0;
};

// Capacity-ordered grouping of systems into k contiguous groups.
// Scores are sorted ascending; each group is non-decreasing and the
// groups are disjoint and jointly exhaustive. Boundaries where the
// adjacent score values tie are recorded in degenerate_boundaries
// (the strict sup ordering cannot hold there).
struct DisjointPartition {
    std::vector<std::vector<CapacityScore>> sets;
    std::size_t k = 0;
    std::vector<std::size_t> degenerate_boundaries;

    bool degenerate() const { return !degenerate_boundaries.empty(); }
};

// c = (p/P * u/U) + (dt/D_total * S).
// Throws std::domain_error if any StackTotals divisor is not positive,
// std::invalid_argument if the metrics violate their invariants.
CapacityScore compute_capacity(const SystemMetrics& m, const StackTotals& t);

// P = sum(p), U = mean(u) clamped to (0, 1], D_total = sum(D).
// Throws std::invalid_argument on an empty list, std::domain_error when
// a resulting total would not be strictly positive.
StackTotals aggregate_stack(const std::vector<SystemMetrics>& all);

// Sort ascending by score (ties by system_id), then split into k
// contiguous groups at equal-quantile boundaries: group i covers
// sorted indices [ceil(n*i/k), ceil(n*(i+1)/k)). Requires 1 <= k <= n.
DisjointPartition partition_systems(std::vector<CapacityScore> scores, std::size_t k);

// mean(u over group) / t.U. The ratio may exceed 1; the caller decides
// what to do with it. Requires a non-empty group and t.U > 0.
double utilization_ratio(const std::vector<SystemMetrics>& group, const StackTotals& t);

} // namespace endurq

#endif
