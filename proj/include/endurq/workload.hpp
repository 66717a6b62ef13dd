#ifndef ENDURQ_WORKLOAD_HPP
#define ENDURQ_WORKLOAD_HPP

#include <cstdint>
#include <string>

#include "endurq/trace.hpp"

namespace endurq {

// Arrival process shapes. poisson: exponential inter-arrivals at
// `rate`. bursty: piecewise poisson alternating burst_rate for the
// first burst_duration seconds of every period and base_rate for the
// rest. sparse: deterministic arrivals every 1/rate + gap seconds.
// replay: the stored trace, verbatim.
struct WorkloadProfile {
    enum class Kind { poisson, bursty, sparse, replay };
    Kind kind = Kind::poisson;

    double rate = 1.0;           // poisson, sparse
    double base_rate = 1.0;      // bursty
    double burst_rate = 1.0;     // bursty
    double burst_duration = 1.0; // bursty
    double period = 1.0;         // bursty
    double gap = 0.0;            // sparse

    double duration = 1.0;
    std::uint64_t seed = 0;
    std::string system_id = "upstream"; // label for generated events
    EventTrace replay_trace;
};

// Deterministic given the profile's seed: the same profile always
// yields the same trace. Throws std::invalid_argument on malformed
// profiles (non-positive rates or durations).
EventTrace generate_workload(const WorkloadProfile& profile);

} // namespace endurq

#endif
