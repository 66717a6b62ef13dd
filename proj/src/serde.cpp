#include "endurq/serde.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace endurq {
namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, end);
}

} // namespace

json to_json(const CapacityScore& score) {
    return json{{"c", score.c}, {"system_id", score.system_id}};
}

json to_json(const DisjointPartition& part) {
    json sets = json::array();
    for (const auto& group : part.sets) {
        json g = json::array();
        for (const auto& score : group) g.push_back(to_json(score));
        sets.push_back(std::move(g));
    }
    return json{{"degenerate_boundaries", part.degenerate_boundaries},
                {"k", part.k},
                {"sets", std::move(sets)}};
}

json to_json(const QueueStats& stats) {
    return json{{"dequeued", stats.dequeued},
                {"dropped", stats.dropped},
                {"enqueued", stats.enqueued},
                {"max_depth_seen", stats.max_depth_seen},
                {"migrations", stats.migrations}};
}

json to_json(const SystemMetrics& m) {
    return json{{"D", m.D},
                {"S", m.S},
                {"dt", m.dt},
                {"p", m.p},
                {"system_id", m.system_id},
                {"u", m.u},
                {"window_end", m.window.end},
                {"window_start", m.window.start}};
}

json to_json(const SpawnPlan& plan) {
    return json{{"target_station", plan.target_station},
                {"thread_count", plan.thread_count},
                {"zeroed_station", plan.zeroed_station}};
}

namespace {

json to_json(const HeatMap& hm) {
    return json{{"bucket_width", hm.bucket_width},
                {"buckets", hm.buckets},
                {"density", hm.density},
                {"peak_mask", hm.peak_mask},
                {"systems", hm.systems}};
}

} // namespace

json to_json(const SimReport& report) {
    json per_system = json::array();
    for (const auto& m : report.per_system) per_system.push_back(to_json(m));
    json capacities = json::array();
    for (const auto& c : report.capacities) capacities.push_back(to_json(c));
    json plans = json::array();
    for (const auto& p : report.spawn_plans) plans.push_back(to_json(p));
    return json{{"capacities", std::move(capacities)},
                {"completed", report.completed},
                {"dropped", report.dropped},
                {"end_to_end_throughput", report.end_to_end_throughput},
                {"generated", report.generated},
                {"heatmap", to_json(report.heatmap)},
                {"in_flight", report.in_flight},
                {"mean_latency", report.mean_latency},
                {"per_system", std::move(per_system)},
                {"queue_stats", to_json(report.queue_stats)},
                {"spawn_plans", std::move(plans)}};
}

std::string depth_timeline_csv(const QueueStats& stats) {
    std::string out = "time,depth\n";
    for (const auto& [time, depth] : stats.depth_timeline)
        out += fmt_double(time) + ',' + std::to_string(depth) + '\n';
    return out;
}

std::vector<SystemMetrics> read_metrics_csv(std::istream& in) {
    static const std::string kHeader = "system_id,p,u,D,dt,S,window_start,window_end";
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("metrics csv: missing header");
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw std::invalid_argument("metrics csv: bad header: " + line);

    std::vector<SystemMetrics> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 8)
            throw std::invalid_argument("metrics csv: line " + std::to_string(lineno) +
                                        ": expected 8 fields");
        SystemMetrics m;
        m.system_id = fields[0];
        try {
            m.p = std::stod(fields[1]);
            m.u = std::stod(fields[2]);
            m.D = std::stod(fields[3]);
            m.dt = std::stod(fields[4]);
            m.S = std::stod(fields[5]);
            m.window.start = std::stod(fields[6]);
            m.window.end = std::stod(fields[7]);
        } catch (const std::exception&) {
            throw std::invalid_argument("metrics csv: line " + std::to_string(lineno) +
                                        ": bad number");
        }
        rows.push_back(std::move(m));
    }
    return rows;
}

void write_metrics_csv(const std::vector<SystemMetrics>& rows, std::ostream& out) {
    out << "system_id,p,u,D,dt,S,window_start,window_end\n";
    for (const auto& m : rows)
        out << m.system_id << ',' << fmt_double(m.p) << ',' << fmt_double(m.u) << ','
            << fmt_double(m.D) << ',' << fmt_double(m.dt) << ',' << fmt_double(m.S)
            << ',' << fmt_double(m.window.start) << ',' << fmt_double(m.window.end)
            << '\n';
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

std::string join(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const auto* a : allowed)
            if (key == a) known = true;
        if (!known) fail(path.empty() ? key : path + "." + key, "unknown key");
    }
}

const json* get(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double need_number(const json& obj, const std::string& path, const char* key,
                   double fallback, bool required = false) {
    const auto* v = get(obj, key);
    if (v == nullptr) {
        if (required) fail(join(path, key), "required");
        return fallback;
    }
    if (!v->is_number()) fail(join(path, key), "expected a number");
    return v->get<double>();
}

std::uint64_t need_uint(const json& obj, const std::string& path, const char* key,
                        std::uint64_t fallback, bool required = false) {
    const auto* v = get(obj, key);
    if (v == nullptr) {
        if (required) fail(join(path, key), "required");
        return fallback;
    }
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v->get<std::int64_t>());
    fail(join(path, key), "expected a non-negative integer");
}

std::string need_string(const json& obj, const std::string& path, const char* key,
                        const std::string& fallback, bool required = false) {
    const auto* v = get(obj, key);
    if (v == nullptr) {
        if (required) fail(join(path, key), "required");
        return fallback;
    }
    if (!v->is_string()) fail(join(path, key), "expected a string");
    return v->get<std::string>();
}

ServiceTime parse_service_time(const json& doc, const std::string& path) {
    if (!doc.is_object()) fail(path, "expected an object");
    check_keys(doc, path, {"kind", "value"});
    const auto kind = need_string(doc, path, "kind", "", true);
    ServiceTime st;
    if (kind == "deterministic")
        st.kind = ServiceTime::Kind::deterministic;
    else if (kind == "exponential")
        st.kind = ServiceTime::Kind::exponential;
    else
        fail(path + ".kind", "expected \"deterministic\" or \"exponential\"");
    st.value = need_number(doc, path, "value", 0.0, true);
    return st;
}

EventTrace parse_inline_events(const json& doc, const std::string& path) {
    if (!doc.is_array()) fail(path, "expected an array of events");
    EventTrace trace;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& e = doc[i];
        const auto epath = path + "[" + std::to_string(i) + "]";
        if (!e.is_object()) fail(epath, "expected an object");
        check_keys(e, epath, {"timestamp", "system_id", "item_count"});
        TraceEvent ev;
        ev.timestamp = need_number(e, epath, "timestamp", 0.0, true);
        ev.system_id = need_string(e, epath, "system_id", "", true);
        ev.item_count = need_uint(e, epath, "item_count", 1);
        trace.events.push_back(std::move(ev));
    }
    return trace;
}

WorkloadProfile parse_workload(const json& doc) {
    const std::string path = "workload";
    if (!doc.is_object()) fail(path, "expected an object");
    const auto kind = need_string(doc, path, "kind", "", true);

    WorkloadProfile w;
    if (kind == "poisson") {
        check_keys(doc, path, {"kind", "rate", "duration", "seed", "system_id"});
        w.kind = WorkloadProfile::Kind::poisson;
        w.rate = need_number(doc, path, "rate", w.rate, true);
    } else if (kind == "bursty") {
        check_keys(doc, path,
                   {"kind", "base_rate", "burst_rate", "burst_duration", "period",
                    "duration", "seed", "system_id"});
        w.kind = WorkloadProfile::Kind::bursty;
        w.base_rate = need_number(doc, path, "base_rate", w.base_rate, true);
        w.burst_rate = need_number(doc, path, "burst_rate", w.burst_rate, true);
        w.burst_duration = need_number(doc, path, "burst_duration", w.burst_duration, true);
        w.period = need_number(doc, path, "period", w.period, true);
    } else if (kind == "sparse") {
        check_keys(doc, path, {"kind", "rate", "gap", "duration", "seed", "system_id"});
        w.kind = WorkloadProfile::Kind::sparse;
        w.rate = need_number(doc, path, "rate", w.rate, true);
        w.gap = need_number(doc, path, "gap", w.gap);
    } else if (kind == "replay") {
        check_keys(doc, path,
                   {"kind", "events", "trace_path", "duration", "seed", "system_id"});
        w.kind = WorkloadProfile::Kind::replay;
        const auto* events = get(doc, "events");
        const auto* trace_path = get(doc, "trace_path");
        if ((events != nullptr) == (trace_path != nullptr))
            fail(path, "replay needs exactly one of \"events\" or \"trace_path\"");
        if (events != nullptr) {
            w.replay_trace = parse_inline_events(*events, path + ".events");
        } else {
            const auto file = need_string(doc, path, "trace_path", "", true);
            std::ifstream in(file);
            if (!in) throw IoError("cannot open trace file: " + file);
            try {
                w.replay_trace = read_trace_csv(in);
            } catch (const std::invalid_argument& e) {
                throw IoError(file + ": " + e.what());
            }
        }
    } else {
        fail(path + ".kind",
             "expected one of \"poisson\", \"bursty\", \"sparse\", \"replay\"");
    }

    w.duration = need_number(doc, path, "duration", w.duration, true);
    w.seed = need_uint(doc, path, "seed", w.seed);
    w.system_id = need_string(doc, path, "system_id", w.system_id);
    return w;
}

} // namespace

SimConfig parse_sim_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    check_keys(doc, "",
               {"systems", "workload", "bucket_width", "cap", "partition_k", "growth_on",
                "seed", "quantize_levels", "d_max", "eps_release", "theta",
                "warmup_fraction", "monitor_max_steps", "peak_quantile", "migrate_reset"});

    SimConfig cfg;
    const auto* systems = get(doc, "systems");
    if (systems == nullptr || !systems->is_array())
        throw ConfigError("systems: required array");
    for (std::size_t i = 0; i < systems->size(); ++i) {
        const auto& s = (*systems)[i];
        const auto path = "systems[" + std::to_string(i) + "]";
        if (!s.is_object()) fail(path, "expected an object");
        check_keys(s, path, {"system_id", "service_time", "d_m"});
        SystemConfig sc;
        sc.system_id = need_string(s, path, "system_id", "", true);
        const auto* st = get(s, "service_time");
        if (st == nullptr) fail(path + ".service_time", "required");
        sc.service_time = parse_service_time(*st, path + ".service_time");
        sc.d_m = need_uint(s, path, "d_m", 1);
        cfg.systems.push_back(std::move(sc));
    }

    const auto* workload = get(doc, "workload");
    if (workload == nullptr) throw ConfigError("workload: required");
    cfg.workload = parse_workload(*workload);

    cfg.bucket_width = need_number(doc, "", "bucket_width", cfg.bucket_width);
    cfg.cap = need_uint(doc, "", "cap", cfg.cap);
    cfg.partition_k = need_uint(doc, "", "partition_k", cfg.partition_k);
    const auto growth_on = need_string(doc, "", "growth_on", "density_drop");
    if (growth_on == "density_drop")
        cfg.growth_on = GrowthOn::density_drop;
    else if (growth_on == "density_rise")
        cfg.growth_on = GrowthOn::density_rise;
    else
        throw ConfigError("growth_on: expected \"density_drop\" or \"density_rise\"");
    cfg.seed = need_uint(doc, "", "seed", cfg.seed);
    cfg.quantize_levels = need_uint(doc, "", "quantize_levels", cfg.quantize_levels);
    cfg.d_max = need_number(doc, "", "d_max", cfg.d_max);
    cfg.eps_release = need_number(doc, "", "eps_release", cfg.eps_release);
    cfg.theta = need_number(doc, "", "theta", cfg.theta);
    cfg.warmup_fraction = need_number(doc, "", "warmup_fraction", cfg.warmup_fraction);
    cfg.monitor_max_steps = need_uint(doc, "", "monitor_max_steps",
                                      cfg.monitor_max_steps);
    cfg.peak_quantile = need_number(doc, "", "peak_quantile", cfg.peak_quantile);
    if (const auto* mr = get(doc, "migrate_reset")) {
        if (!mr->is_boolean()) throw ConfigError("migrate_reset: expected a boolean");
        cfg.migrate_reset = mr->get<bool>();
    }

    const auto problem = validate_config(cfg);
    if (!problem.empty()) throw ConfigError(problem);
    return cfg;
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_sim_config(doc);
}

} // namespace endurq
