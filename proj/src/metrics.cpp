#include "endurq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace endurq {

namespace {

void check_metrics(const SystemMetrics& m) {
    if (!(m.u >= 0.0 && m.u <= 1.0))
        throw std::invalid_argument("SystemMetrics.u must be in [0, 1]: " + m.system_id);
    if (m.p < 0.0 || m.D < 0.0 || m.dt < 0.0 || m.S < 0.0)
        throw std::invalid_argument("SystemMetrics rates must be non-negative: " + m.system_id);
    if (!m.window.valid())
        throw std::invalid_argument("SystemMetrics.window must be non-empty: " + m.system_id);
}

} // namespace

CapacityScore compute_capacity(const SystemMetrics& m, const StackTotals& t) {
    check_metrics(m);
    if (t.P <= 0.0) throw std::domain_error("StackTotals.P must be > 0");
    if (t.U <= 0.0) throw std::domain_error("StackTotals.U must be > 0");
    if (t.D_total <= 0.0) throw std::domain_error("StackTotals.D_total must be > 0");

    const double c = (m.p / t.P) * (m.u / t.U) + (m.dt / t.D_total) * m.S;
    return CapacityScore{m.system_id, c};
}

StackTotals aggregate_stack(const std::vector<SystemMetrics>& all) {
    if (all.empty()) throw std::invalid_argument("aggregate_stack: empty metrics list");

    StackTotals t;
    double u_sum = 0.0;
    for (const auto& m : all) {
        check_metrics(m);
        t.P += m.p;
        u_sum += m.u;
        t.D_total += m.D;
    }
    t.U = std::min(1.0, u_sum / static_cast<double>(all.size()));

    if (t.P <= 0.0) throw std::domain_error("aggregate_stack: total throughput P must be > 0");
    if (t.U <= 0.0) throw std::domain_error("aggregate_stack: mean utilization U must be > 0");
    if (t.D_total <= 0.0) throw std::domain_error("aggregate_stack: total demand must be > 0");
    return t;
}

DisjointPartition partition_systems(std::vector<CapacityScore> scores, std::size_t k) {
    const std::size_t n = scores.size();
    if (k < 1 || k > n)
        throw std::invalid_argument("partition_systems: k must be in [1, |scores|]");

    std::sort(scores.begin(), scores.end(), [](const CapacityScore& a, const CapacityScore& b) {
        if (a.c != b.c) return a.c < b.c;
        return a.system_id < b.system_id;
    });

    DisjointPartition part;
    part.k = k;
    part.sets.reserve(k);
    // Equal-quantile boundaries: group i covers [ceil(n*i/k), ceil(n*(i+1)/k)).
    const auto bound = [&](std::size_t i) { return (n * i + k - 1) / k; };
    for (std::size_t i = 0; i < k; ++i) {
        part.sets.emplace_back(scores.begin() + static_cast<std::ptrdiff_t>(bound(i)),
                               scores.begin() + static_cast<std::ptrdiff_t>(bound(i + 1)));
    }
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (part.sets[i].back().c == part.sets[i + 1].front().c)
            part.degenerate_boundaries.push_back(i);
    }
    return part;
}

double utilization_ratio(const std::vector<SystemMetrics>& group, const StackTotals& t) {
    if (group.empty()) throw std::invalid_argument("utilization_ratio: empty group");
    if (t.U <= 0.0) throw std::domain_error("utilization_ratio: t.U must be > 0");

    double u_sum = 0.0;
    for (const auto& m : group) u_sum += m.u;
    return (u_sum / static_cast<double>(group.size())) / t.U;
}

} // namespace endurq
