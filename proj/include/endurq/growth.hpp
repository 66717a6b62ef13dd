#ifndef ENDURQ_GROWTH_HPP
#define ENDURQ_GROWTH_HPP

#include <cstdint>
#include <vector>

#include "endurq/heatmap.hpp"

namespace endurq {

// Non-negative integer that clips at a configured cap instead of
// overflowing. saturated implies value == cap.
struct SaturatingValue {
    std::uint64_t value = 0;
    bool saturated = false;

    bool operator==(const SaturatingValue&) const = default;
};

inline constexpr std::uint64_t kDefaultCap = 1u << 20;
// Caps above 2^62 would make the m=3 closed form ambiguous in 64 bits.
inline constexpr std::uint64_t kMaxCap = 1ull << 62;

// Two-argument Ackermann value, exact when it fits under cap and
// {cap, saturated} otherwise. m <= 3 uses the closed forms
//   A(0,n) = n+1,  A(1,n) = n+2,  A(2,n) = 2n+3,  A(3,n) = 2^(n+3)-3
// and m >= 4 expands the recurrence, short-circuiting as soon as an
// argument reaches cap (A(m, n) >= n + 1, so every enclosing value
// saturates with it); past A(4, 1) that happens within a couple of
// expansions. Total for every input; requires 1 <= cap <= 2^62.
SaturatingValue ackermann(std::uint64_t m, std::uint64_t n, std::uint64_t cap = kDefaultCap);

// Value sequence of the leftmost-innermost reduction of A(m, n): one
// entry per subterm resolved to a number, in resolution order. The
// sequence is not monotone; intermediate values may dip. A numeral at
// or above cap resolves its enclosing application immediately to
// {cap, saturated}. If max_steps reduction entries are recorded before
// the term is fully reduced, truncated is set and the final value
// ackermann(m, n, cap) is appended as one last step, mirroring how the
// expansion is usually written: a few explicit steps, an ellipsis, then
// the resolved value.
struct GrowthTrace {
    std::uint64_t m = 0;
    std::uint64_t n = 0;
    std::vector<SaturatingValue> steps;
    bool truncated = false;
};

GrowthTrace ackermann_trace(std::uint64_t m, std::uint64_t n,
                            std::uint64_t cap = kDefaultCap,
                            std::size_t max_steps = 4096);

// Map a real-valued service demand onto an integer level:
// floor(min(D_s, d_max) / d_max * levels), clamped to [0, levels].
// Level 0 plays the role of the D_s = 0 ideal case. Throws on
// negative demand; requires levels >= 1 and d_max > 0.
std::uint64_t quantize_demand(double service_demand, std::uint64_t levels, double d_max);

// What the monitor wants the queue to do next.
struct Decision {
    enum class Kind { grow, hold, migrate };
    Kind kind = Kind::hold;
    std::uint64_t grow_to = 0; // target depth, only for Kind::grow
};

// Whether a qualifying density observation is a drop (dt_i > dt_next,
// the literal loop condition) or a rise (dt_i < dt_next).
enum class GrowthOn { density_drop, density_rise };

struct MonitorConfig {
    std::uint64_t cap = kDefaultCap;
    std::uint64_t levels = 4;     // quantizer levels
    double d_max = 1.0;           // quantizer scale, seconds
    double eps = 0.01;            // tolerance for the r = 1 check
    GrowthOn growth_on = GrowthOn::density_drop;
    std::size_t trace_max_steps = 64; // per rebuilt growth trace
};

// One observation per window: densities of the two most recent
// buckets, the current service demand, and the capacity ratio
// r = C_i / C of the anchoring set.
struct Observation {
    double dt_i = 0.0;
    double dt_next = 0.0;
    double service_demand = 0.0;
    double capacity_ratio = 0.0;
};

// Position inside the growth schedule. A monitor is single-owner:
// exactly one actor advances it; states may move between threads but
// are never mutated concurrently.
struct MonitorState {
    std::uint64_t q_depth = 0;             // Q_d
    SaturatingValue q_growth{1, false};    // Q_g
    std::uint64_t demand_level = 0;        // level the current trace was built at
    std::size_t trace_pos = 0;             // next step in `trace`
    GrowthTrace trace;                     // current reduction schedule
    Anchor anchor;
};

struct StepResult {
    MonitorState state;
    Decision decision;
};

// Q_d = 0, Q_g = Q_d + 1 = 1.
MonitorState init_monitor();

// Advance the monitor by one observation. Decision rules, applied in
// this order:
//   1. |r - 1| <= eps            -> migrate; the anchor is released.
//      Migration preempts growth: the step that ends a placement does
//      not also grow.
//   2. D_s quantizes to level 0  -> grow(Q_d + 1), the A(0, Q_d)
//      base case. Any pending trace is discarded.
//   3. qualifying density change -> advance one step in the reduction
//      trace of A(level, Q_d); Q_g = step + 1; grow to Q_g. The trace
//      is rebuilt at the current (level, Q_d) when the level changed
//      or the previous trace is exhausted.
//   4. otherwise                 -> hold.
// Grow targets are clamped to [Q_d, cap] so the depth never shrinks;
// Q_d tracks the clamped target. Non-finite or negative observations
// degrade to hold.
StepResult monitor_step(const MonitorState& state, const Observation& obs,
                        const MonitorConfig& cfg = {});

// Long-run growth index: sum over windows of the product of the Q_g
// values inside each window, in saturating arithmetic. Windows with no
// values contribute nothing.
SaturatingValue long_run_growth_index(const std::vector<std::vector<std::uint64_t>>& history,
                                      std::uint64_t cap = kDefaultCap);

} // namespace endurq

#endif
