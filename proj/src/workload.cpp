#include "endurq/workload.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace endurq {
namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("generate_workload: ") + what);
}

} // namespace

EventTrace generate_workload(const WorkloadProfile& profile) {
    require(std::isfinite(profile.duration) && profile.duration > 0.0,
            "duration must be > 0");

    EventTrace trace;
    std::mt19937_64 rng(profile.seed);

    switch (profile.kind) {
    case WorkloadProfile::Kind::poisson: {
        require(std::isfinite(profile.rate) && profile.rate > 0.0, "rate must be > 0");
        std::exponential_distribution<double> inter(profile.rate);
        for (double t = inter(rng); t < profile.duration; t += inter(rng))
            trace.events.push_back({t, profile.system_id, 1});
        break;
    }
    case WorkloadProfile::Kind::bursty: {
        require(profile.base_rate > 0.0, "base_rate must be > 0");
        require(profile.burst_rate > 0.0, "burst_rate must be > 0");
        require(profile.period > 0.0, "period must be > 0");
        require(profile.burst_duration > 0.0 && profile.burst_duration <= profile.period,
                "burst_duration must be in (0, period]");
        // Piecewise-constant Poisson: sample at the current rate and,
        // when the draw crosses a rate change, restart from the
        // boundary (memorylessness makes that exact).
        double t = 0.0;
        while (t < profile.duration) {
            const double phase = std::fmod(t, profile.period);
            const bool in_burst = phase < profile.burst_duration;
            const double rate = in_burst ? profile.burst_rate : profile.base_rate;
            const double boundary =
                t - phase + (in_burst ? profile.burst_duration : profile.period);
            std::exponential_distribution<double> inter(rate);
            const double next = t + inter(rng);
            if (next < boundary && next < profile.duration) {
                t = next;
                trace.events.push_back({t, profile.system_id, 1});
            } else {
                t = boundary;
            }
        }
        break;
    }
    case WorkloadProfile::Kind::sparse: {
        require(std::isfinite(profile.rate) && profile.rate > 0.0, "rate must be > 0");
        require(std::isfinite(profile.gap) && profile.gap >= 0.0, "gap must be >= 0");
        const double interval = 1.0 / profile.rate + profile.gap;
        for (std::uint64_t k = 1; static_cast<double>(k) * interval < profile.duration; ++k)
            trace.events.push_back({static_cast<double>(k) * interval, profile.system_id, 1});
        break;
    }
    case WorkloadProfile::Kind::replay: {
        for (const auto& e : profile.replay_trace.events)
            require(e.timestamp >= 0.0 && e.item_count >= 1, "replay events malformed");
        require(profile.replay_trace.is_time_ordered(), "replay trace must be time ordered");
        return profile.replay_trace;
    }
    }
    return trace;
}

} // namespace endurq
