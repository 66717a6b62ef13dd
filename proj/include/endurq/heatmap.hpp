#ifndef ENDURQ_HEATMAP_HPP
#define ENDURQ_HEATMAP_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "endurq/metrics.hpp"
#include "endurq/trace.hpp"

namespace endurq {

// Time-bucket x system matrix of data density with an optional peak
// service demand overlay. density[b][s] counts items for system s whose
// timestamp falls in [b*w, (b+1)*w).
struct HeatMap {
    std::size_t buckets = 0;
    std::vector<std::string> systems;
    std::vector<std::vector<std::uint64_t>> density; // [bucket][system]
    std::vector<std::vector<std::uint8_t>> peak_mask; // [bucket][system]
    double bucket_width = 1.0;

    std::uint64_t total_density() const;
    // Column index of a system id, or npos when absent.
    std::size_t system_index(const std::string& id) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Where the queue sits: the boundary between two adjacent partition
// groups, pinned to the time bucket with the highest boundary density.
struct PlacementPoint {
    std::size_t boundary_index = 0; // in [0, k-2]
    std::size_t bucket_index = 0;   // in [0, buckets-1]
    bool anchored = false;
};

// Placement binding between the queue and a disjoint set. released is
// monotone within a run: once true it never reverts.
struct Anchor {
    std::size_t group_index = 0;
    bool released = false;
};

// Bucket items by timestamp. Column order comes from system_order; an
// event whose system_id is not listed is an error. Bucket count is
// floor(max_ts / w) + 1, but never less than min_buckets. An empty
// trace yields max(0, min_buckets) buckets. Negative timestamps and
// non-positive widths are rejected.
HeatMap build_heatmap(const EventTrace& trace, double bucket_width,
                      const std::vector<std::string>& system_order,
                      std::size_t min_buckets = 0);

// Convenience overload: column order = sorted unique system ids found
// in the trace.
HeatMap build_heatmap(const EventTrace& trace, double bucket_width);

// Mark peak_mask[b][s] = true iff demand[b][s] >= the per-system
// nearest-rank quantile threshold sorted_col[min(n-1, floor(q*n))].
// demand must have the same dimensions as hm; 0 < quantile <= 1.
HeatMap overlay_peak_demand(HeatMap hm,
                            const std::vector<std::vector<double>>& demand,
                            double quantile);

// Pick the adjacent-group boundary with the highest total density
// (summed over all buckets and over the systems of the two adjacent
// groups), then the bucket with the highest density for that boundary.
// Ties break toward the lowest index. Requires part.k >= 2 and at
// least one bucket. Systems missing from the heat map contribute zero.
PlacementPoint select_queue_position(const HeatMap& hm, const DisjointPartition& part);

// Release the anchor when the ratio has reached 1: released becomes
// true iff |ratio - 1| <= eps or ratio > 1. Never clears the flag.
Anchor check_release(Anchor anchor, double ratio, double eps = 0.01);

enum class HeatMapFormat { csv, ppm };

// csv: header "bucket,<id1>,..." then one row per bucket with integer
// densities. ppm: binary P6, width = |systems|, height = buckets,
// density scaled to 0-255 gray as (d * 255) / max_density; peak cells
// get a full-intensity red channel.
std::string export_heatmap(const HeatMap& hm, HeatMapFormat format);

// Inverse of the csv export (density and system ids only; the peak
// mask is not carried by the CSV form).
HeatMap import_heatmap_csv(std::istream& in, double bucket_width = 1.0);

} // namespace endurq

#endif
