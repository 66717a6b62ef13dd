#include "endurq/trace.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace endurq {

std::uint64_t EventTrace::total_items() const {
    std::uint64_t total = 0;
    for (const auto& e : events) total += e.item_count;
    return total;
}

bool EventTrace::is_time_ordered() const {
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].timestamp < events[i - 1].timestamp) return false;
    return true;
}

void write_trace_csv(const EventTrace& trace, std::ostream& out) {
    out << "timestamp,system_id,item_count\n";
    char buf[64];
    for (const auto& e : trace.events) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), e.timestamp,
                                       std::chars_format::general, 17);
        out.write(buf, end - buf);
        out << ',' << e.system_id << ',' << e.item_count << '\n';
    }
}

EventTrace read_trace_csv(std::istream& in) {
    EventTrace trace;
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("trace csv: missing header");
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,system_id,item_count")
        throw std::invalid_argument("trace csv: bad header: " + line);

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string ts, id, count;
        if (!std::getline(row, ts, ',') || !std::getline(row, id, ',') ||
            !std::getline(row, count))
            throw std::invalid_argument("trace csv: line " + std::to_string(lineno) +
                                        ": expected timestamp,system_id,item_count");
        TraceEvent e;
        try {
            e.timestamp = std::stod(ts);
            e.item_count = std::stoull(count);
        } catch (const std::exception&) {
            throw std::invalid_argument("trace csv: line " + std::to_string(lineno) +
                                        ": bad number");
        }
        e.system_id = id;
        if (e.timestamp < 0.0)
            throw std::invalid_argument("trace csv: line " + std::to_string(lineno) +
                                        ": negative timestamp");
        if (e.item_count < 1)
            throw std::invalid_argument("trace csv: line " + std::to_string(lineno) +
                                        ": item_count must be >= 1");
        trace.events.push_back(std::move(e));
    }
    return trace;
}

} // namespace endurq
