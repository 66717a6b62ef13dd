#ifndef ENDURQ_QUEUE_HPP
#define ENDURQ_QUEUE_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "endurq/growth.hpp"
#include "endurq/heatmap.hpp"

namespace endurq {

struct WorkItem {
    std::uint64_t id = 0;
    double arrival_time = 0.0;
    std::uint64_t size = 1;
    std::string source_system;
};

// enqueued counts every offered item, accepted or not, so that
// enqueued = dequeued + dropped + occupancy holds at every observation
// point.
struct QueueStats {
    std::uint64_t enqueued = 0;
    std::uint64_t dequeued = 0;
    std::uint64_t dropped = 0;
    std::uint64_t migrations = 0;
    std::uint64_t max_depth_seen = 0;
    std::vector<std::pair<double, std::uint64_t>> depth_timeline;
};

enum class EnqueueResult { accepted, dropped };

// Bounded FIFO buffer whose capacity is driven by monitor Decisions.
// Depth starts at 1, never drops below 1 and never shrinks; overflow
// is drop-newest (rejected at enqueue), which is what makes throttling
// measurable.
//
// Concurrency contract: one producer (enqueue) and one consumer
// (dequeue) may operate from different threads only if the caller
// serializes their access externally; growth and migration decisions
// are applied by the monitor actor strictly between event-processing
// steps. The queue itself performs no locking.
class EnduranceQueue {
public:
    // Empty queue at depth 1. Throws when cap < 1.
    EnduranceQueue(std::uint64_t cap, PlacementPoint placement);

    // Accepted iff there is room at the current depth; a full queue
    // drops the item (a result, not an error).
    EnqueueResult enqueue(WorkItem item);

    // Oldest item, or nullopt when empty. Depth is unchanged.
    std::optional<WorkItem> dequeue();

    // grow(t): depth <- max(depth, min(t, cap)); hold: no change;
    // migrate: no change here, the relocation itself goes through
    // migrate() which knows the target placement.
    void apply_growth(const Decision& d);

    // Relocate to new_placement keeping all buffered items. Requires a
    // released anchor; installs a fresh unreleased anchor bound to the
    // new boundary. Depth is retained unless reset_depth is true.
    void migrate(PlacementPoint new_placement, bool reset_depth = false);

    // Record (now, depth) on the timeline and return a stats copy.
    QueueStats snapshot(double now);

    // check_release over the queue's own anchor; monotone.
    void apply_release(double ratio, double eps = 0.01);

    std::uint64_t depth() const { return depth_; }
    std::uint64_t cap() const { return cap_; }
    std::uint64_t occupancy() const { return items_.size(); }
    const PlacementPoint& placement() const { return placement_; }
    const Anchor& anchor() const { return anchor_; }
    void release_anchor() { anchor_.released = true; }
    const QueueStats& stats() const { return stats_; }

private:
    std::deque<WorkItem> items_;
    std::uint64_t depth_ = 1;
    std::uint64_t cap_ = 1;
    PlacementPoint placement_;
    Anchor anchor_;
    QueueStats stats_;
};

} // namespace endurq

#endif
