#ifndef ENDURQ_TRACE_HPP
#define ENDURQ_TRACE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace endurq {

struct TraceEvent {
    double timestamp = 0.0; // seconds, >= 0
    std::string system_id;
    std::uint64_t item_count = 1; // >= 1
};

// Ordered stream of arrival observations. Generators and the simulator
// produce time-ordered traces; consumers that require ordering check it
// with is_time_ordered().
struct EventTrace {
    std::vector<TraceEvent> events;

    std::uint64_t total_items() const;
    bool is_time_ordered() const;
};

// CSV format: header "timestamp,system_id,item_count", one event per row.
// Writers emit timestamps with enough digits to round-trip exactly.
void write_trace_csv(const EventTrace& trace, std::ostream& out);
EventTrace read_trace_csv(std::istream& in);

} // namespace endurq

#endif
