#include "endurq/queue.hpp"

#include <algorithm>
#include <stdexcept>

namespace endurq {

EnduranceQueue::EnduranceQueue(std::uint64_t cap, PlacementPoint placement)
    : cap_(cap), placement_(placement) {
    if (cap < 1) throw std::invalid_argument("EnduranceQueue: cap must be >= 1");
    anchor_ = Anchor{placement.boundary_index, false};
    stats_.max_depth_seen = depth_;
}

EnqueueResult EnduranceQueue::enqueue(WorkItem item) {
    stats_.enqueued += 1;
    if (items_.size() >= depth_) {
        stats_.dropped += 1;
        return EnqueueResult::dropped;
    }
    items_.push_back(std::move(item));
    return EnqueueResult::accepted;
}

std::optional<WorkItem> EnduranceQueue::dequeue() {
    if (items_.empty()) return std::nullopt;
    WorkItem item = std::move(items_.front());
    items_.pop_front();
    stats_.dequeued += 1;
    return item;
}

void EnduranceQueue::apply_growth(const Decision& d) {
    if (d.kind != Decision::Kind::grow) return;
    depth_ = std::max(depth_, std::min(d.grow_to, cap_));
    stats_.max_depth_seen = std::max(stats_.max_depth_seen, depth_);
}

void EnduranceQueue::migrate(PlacementPoint new_placement, bool reset_depth) {
    if (!anchor_.released)
        throw std::logic_error("EnduranceQueue: migrate before the anchor released");
    placement_ = new_placement;
    anchor_ = Anchor{new_placement.boundary_index, false};
    if (reset_depth) depth_ = 1;
    stats_.migrations += 1;
}

QueueStats EnduranceQueue::snapshot(double now) {
    stats_.depth_timeline.emplace_back(now, depth_);
    return stats_;
}

void EnduranceQueue::apply_release(double ratio, double eps) {
    anchor_ = check_release(anchor_, ratio, eps);
}

} // namespace endurq
