#include "endurq/growth.hpp"

#include <cmath>
#include <stdexcept>

namespace endurq {
namespace {

void check_cap(std::uint64_t cap) {
    if (cap < 1 || cap > kMaxCap)
        throw std::invalid_argument("cap must be in [1, 2^62]");
}

SaturatingValue clip(std::uint64_t v, std::uint64_t cap) {
    return v < cap ? SaturatingValue{v, false} : SaturatingValue{cap, true};
}

SaturatingValue sat_add(SaturatingValue a, SaturatingValue b, std::uint64_t cap) {
    const auto sum = static_cast<unsigned __int128>(a.value) + b.value;
    if (a.saturated || b.saturated || sum >= cap) return {cap, true};
    return {static_cast<std::uint64_t>(sum), false};
}

SaturatingValue sat_mul(SaturatingValue a, std::uint64_t b, std::uint64_t cap) {
    if (b == 0) return {0, false};
    const auto prod = static_cast<unsigned __int128>(a.value) * b;
    if (a.saturated || prod >= cap) return {cap, true};
    return {static_cast<std::uint64_t>(prod), false};
}

} // namespace

SaturatingValue ackermann(std::uint64_t m, std::uint64_t n, std::uint64_t cap) {
    check_cap(cap);
    if (n >= cap) return {cap, true}; // A(m, n) >= n + 1
    switch (m) {
    case 0: return clip(n + 1, cap);
    case 1: return clip(n + 2, cap);
    case 2: return clip(2 * n + 3, cap);
    case 3:
        if (n >= 61) return {cap, true}; // 2^(n+3) >= 2^64 > cap
        return clip((1ull << (n + 3)) - 3, cap);
    default: break;
    }
    // A(4, 2) = 2^65536 - 3 exceeds kMaxCap, and the function is
    // monotone in both arguments, so only three cases can stay finite.
    if (m >= 6 || n >= 2) return {cap, true};
    if (m == 5) return n == 0 ? ackermann(4, 1, cap) : SaturatingValue{cap, true};
    if (n == 0) return ackermann(3, 1, cap);
    const auto inner = ackermann(4, 0, cap);
    return inner.saturated ? SaturatingValue{cap, true} : ackermann(3, inner.value, cap);
}

GrowthTrace ackermann_trace(std::uint64_t m, std::uint64_t n, std::uint64_t cap,
                            std::size_t max_steps) {
    check_cap(cap);
    GrowthTrace trace;
    trace.m = m;
    trace.n = n;

    std::vector<std::uint64_t> pending; // outer m's awaiting an argument
    std::uint64_t cur_m = m;
    std::uint64_t cur_n = n;

    // Leftmost-innermost reduction of the nest A(m1, A(m2, ... A(mk, n))):
    // the innermost application is (cur_m, cur_n), the rest sit in
    // `pending`. Only applications resolving to a numeral are recorded.
    while (true) {
        if (trace.steps.size() >= max_steps) {
            trace.truncated = true;
            trace.steps.push_back(ackermann(m, n, cap));
            return trace;
        }
        if (cur_n >= cap || cur_m == 0) {
            const auto v = cur_n >= cap ? SaturatingValue{cap, true} : clip(cur_n + 1, cap);
            trace.steps.push_back(v);
            if (pending.empty()) return trace;
            cur_m = pending.back();
            pending.pop_back();
            cur_n = v.value;
        } else if (cur_n == 0) {
            cur_m -= 1;
            cur_n = 1;
        } else {
            pending.push_back(cur_m - 1);
            cur_n -= 1;
        }
    }
}

std::uint64_t quantize_demand(double service_demand, std::uint64_t levels, double d_max) {
    if (levels < 1) throw std::invalid_argument("quantize_demand: levels must be >= 1");
    if (!(d_max > 0.0)) throw std::invalid_argument("quantize_demand: d_max must be > 0");
    if (!(service_demand >= 0.0))
        throw std::invalid_argument("quantize_demand: demand must be >= 0");
    const double frac = std::min(service_demand, d_max) / d_max;
    const auto level = static_cast<std::uint64_t>(std::floor(frac * static_cast<double>(levels)));
    return std::min(level, levels);
}

MonitorState init_monitor() {
    MonitorState state;
    state.q_depth = 0;
    state.q_growth = {1, false};
    return state;
}

namespace {

bool valid_observation(const Observation& obs) {
    const auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    return ok(obs.dt_i) && ok(obs.dt_next) && ok(obs.service_demand) &&
           ok(obs.capacity_ratio);
}

void check_monitor_config(const MonitorConfig& cfg) {
    check_cap(cfg.cap);
    if (cfg.levels < 1) throw std::invalid_argument("monitor: levels must be >= 1");
    if (!(cfg.d_max > 0.0)) throw std::invalid_argument("monitor: d_max must be > 0");
    if (!(cfg.eps >= 0.0)) throw std::invalid_argument("monitor: eps must be >= 0");
}

} // namespace

StepResult monitor_step(const MonitorState& state, const Observation& obs,
                        const MonitorConfig& cfg) {
    check_monitor_config(cfg);
    StepResult out{state, {}};
    if (!valid_observation(obs)) return out;

    const auto released = check_release(out.state.anchor, obs.capacity_ratio, cfg.eps);
    if (released.released) {
        out.state.anchor = released;
        out.decision.kind = Decision::Kind::migrate;
        return out;
    }

    const auto level = quantize_demand(obs.service_demand, cfg.levels, cfg.d_max);
    if (level == 0) {
        out.state.q_growth = clip(state.q_depth + 1, cfg.cap);
        out.state.q_depth = out.state.q_growth.value;
        out.state.demand_level = 0;
        out.state.trace = {};
        out.state.trace_pos = 0;
        out.decision = {Decision::Kind::grow, out.state.q_depth};
        return out;
    }

    const bool qualifying = cfg.growth_on == GrowthOn::density_drop
                                ? obs.dt_i > obs.dt_next
                                : obs.dt_i < obs.dt_next;
    if (!qualifying) return out;

    if (level != state.demand_level || out.state.trace_pos >= out.state.trace.steps.size()) {
        out.state.trace = ackermann_trace(level, state.q_depth, cfg.cap, cfg.trace_max_steps);
        out.state.trace_pos = 0;
        out.state.demand_level = level;
    }
    const auto step = out.state.trace.steps[out.state.trace_pos];
    out.state.trace_pos += 1;
    out.state.q_growth = step.saturated ? SaturatingValue{cfg.cap, true}
                                        : clip(step.value + 1, cfg.cap);
    out.state.q_depth = std::max(state.q_depth, out.state.q_growth.value);
    out.decision = {Decision::Kind::grow, out.state.q_depth};
    return out;
}

SaturatingValue long_run_growth_index(const std::vector<std::vector<std::uint64_t>>& history,
                                      std::uint64_t cap) {
    check_cap(cap);
    SaturatingValue total{0, false};
    for (const auto& window : history) {
        if (window.empty()) continue;
        SaturatingValue prod{1, false};
        for (auto v : window) prod = sat_mul(prod, v, cap);
        total = sat_add(total, prod, cap);
    }
    return total;
}

} // namespace endurq
