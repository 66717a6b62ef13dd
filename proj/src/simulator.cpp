#include "endurq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>

#include "endurq/log.hpp"

namespace endurq {

std::vector<SystemMetrics> collect_metrics(const RunAccounting& acct,
                                           std::size_t first_bucket,
                                           std::size_t last_bucket) {
    if (first_bucket >= last_bucket || last_bucket > acct.buckets)
        throw std::invalid_argument("collect_metrics: window outside simulated time");
    const double wlen = static_cast<double>(last_bucket - first_bucket) * acct.bucket_width;

    std::vector<SystemMetrics> out;
    out.reserve(acct.systems.size());
    for (const auto& sys : acct.systems) {
        std::uint64_t comps = 0;
        std::uint64_t arr = 0;
        double busy = 0.0;
        double ssum = 0.0;
        for (std::size_t b = first_bucket; b < last_bucket; ++b) {
            comps += sys.completions[b];
            arr += sys.arrivals[b];
            busy += sys.busy_time[b];
            ssum += sys.service_time_sum[b];
        }
        SystemMetrics m;
        m.system_id = sys.system_id;
        m.p = static_cast<double>(comps) / wlen;
        m.u = std::clamp(busy / (static_cast<double>(sys.servers) * wlen), 0.0, 1.0);
        m.D = comps > 0 ? busy / static_cast<double>(comps) : 0.0;
        m.dt = static_cast<double>(arr);
        m.S = comps > 0 ? ssum / static_cast<double>(comps) : 0.0;
        m.window = {static_cast<double>(first_bucket) * acct.bucket_width,
                    static_cast<double>(last_bucket) * acct.bucket_width};
        out.push_back(std::move(m));
    }
    return out;
}

std::string validate_config(const SimConfig& cfg) {
    if (cfg.systems.size() < 2)
        return "systems: need at least two entries, an upstream and a downstream";
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cfg.systems.size(); ++i) {
        const auto& s = cfg.systems[i];
        const auto field = "systems[" + std::to_string(i) + "]";
        if (s.system_id.empty()) return field + ".system_id: must not be empty";
        if (!seen.insert(s.system_id).second)
            return field + ".system_id: duplicate \"" + s.system_id + "\"";
        if (!(std::isfinite(s.service_time.value)) || s.service_time.value < 0.0)
            return field + ".service_time: must be a finite value >= 0";
        if (s.service_time.kind == ServiceTime::Kind::exponential &&
            !(s.service_time.value > 0.0))
            return field + ".service_time: exponential mean must be > 0";
        if (s.d_m < 1) return field + ".d_m: must be >= 1";
    }

    const auto& w = cfg.workload;
    if (!(std::isfinite(w.duration)) || !(w.duration > 0.0))
        return "workload.duration: must be > 0";
    switch (w.kind) {
    case WorkloadProfile::Kind::poisson:
        if (!(w.rate > 0.0)) return "workload.rate: must be > 0";
        break;
    case WorkloadProfile::Kind::sparse:
        if (!(w.rate > 0.0)) return "workload.rate: must be > 0";
        if (!(w.gap >= 0.0)) return "workload.gap: must be >= 0";
        break;
    case WorkloadProfile::Kind::bursty:
        if (!(w.base_rate > 0.0)) return "workload.base_rate: must be > 0";
        if (!(w.burst_rate > 0.0)) return "workload.burst_rate: must be > 0";
        if (!(w.period > 0.0)) return "workload.period: must be > 0";
        if (!(w.burst_duration > 0.0) || w.burst_duration > w.period)
            return "workload.burst_duration: must be in (0, period]";
        break;
    case WorkloadProfile::Kind::replay:
        for (const auto& e : w.replay_trace.events)
            if (e.timestamp < 0.0 || e.item_count < 1)
                return "workload.replay_trace: events must have timestamp >= 0 and count >= 1";
        if (!w.replay_trace.is_time_ordered())
            return "workload.replay_trace: must be time ordered";
        break;
    }

    if (!(std::isfinite(cfg.bucket_width)) || !(cfg.bucket_width > 0.0))
        return "bucket_width: must be > 0";
    if (cfg.bucket_width > cfg.workload.duration)
        return "bucket_width: must not exceed workload.duration";
    if (cfg.cap < 1 || cfg.cap > kMaxCap) return "cap: must be in [1, 2^62]";
    if (cfg.partition_k < 2 || cfg.partition_k > cfg.systems.size())
        return "partition_k: must be in [2, number of systems]";
    if (cfg.quantize_levels < 1) return "quantize_levels: must be >= 1";
    if (!(cfg.d_max > 0.0)) return "d_max: must be > 0";
    if (!(cfg.eps_release >= 0.0)) return "eps_release: must be >= 0";
    if (!(cfg.theta > 1.0)) return "theta: must be > 1";
    if (!(cfg.warmup_fraction >= 0.0) || cfg.warmup_fraction >= 1.0)
        return "warmup_fraction: must be in [0, 1)";
    if (cfg.monitor_max_steps < 1) return "monitor_max_steps: must be >= 1";
    if (!(cfg.peak_quantile > 0.0) || cfg.peak_quantile > 1.0)
        return "peak_quantile: must be in (0, 1]";
    return "";
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

// Service draws are a pure function of (run seed, stage, item id) so
// both comparison arms see identical times for the same item.
double service_duration(std::uint64_t seed, std::size_t stage, std::uint64_t id,
                        const ServiceTime& st) {
    if (st.kind == ServiceTime::Kind::deterministic) return st.value;
    const auto h = mix64(mix64(mix64(seed) ^ stage) ^ id);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return -st.value * std::log1p(-u);
}

struct Event {
    double t = 0.0;
    int kind = 0; // 0 completion, 1 source arrival; ticks run before both
    std::uint64_t seq = 0;
    std::size_t stage = 0;
    std::uint64_t id = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        if (a.kind != b.kind) return a.kind > b.kind;
        return a.seq > b.seq;
    }
};

struct StageState {
    std::uint64_t busy = 0;
    std::deque<WorkItem> wait;
    double last_accrual = 0.0;
};

class Engine {
public:
    Engine(const SimConfig& cfg, QueuePolicy policy) : cfg_(cfg), policy_(policy) {
        const auto problem = validate_config(cfg);
        if (!problem.empty()) throw std::invalid_argument(problem);
    }

    SimReport run();

private:
    std::size_t bucket_of(double t) const {
        return static_cast<std::size_t>(std::floor(t / cfg_.bucket_width));
    }

    void ensure_bucket(std::size_t b) {
        if (b < acct_.buckets) return;
        for (auto& sys : acct_.systems) {
            sys.arrivals.resize(b + 1, 0);
            sys.completions.resize(b + 1, 0);
            sys.busy_time.resize(b + 1, 0.0);
            sys.service_time_sum.resize(b + 1, 0.0);
        }
        acct_.buckets = b + 1;
    }

    void accrue(std::size_t k, double now) {
        auto& st = stages_[k];
        if (now <= st.last_accrual) return;
        const auto b = bucket_of(st.last_accrual);
        ensure_bucket(b);
        acct_.systems[k].busy_time[b] +=
            static_cast<double>(st.busy) * (now - st.last_accrual);
        st.last_accrual = now;
    }

    void pump(std::size_t k, double now) {
        auto& st = stages_[k];
        while (st.busy < cfg_.systems[k].d_m) {
            std::optional<WorkItem> item;
            if (queue_ && k == queue_stage_) {
                item = queue_->dequeue();
            } else if (!st.wait.empty()) {
                item = std::move(st.wait.front());
                st.wait.pop_front();
            }
            if (!item) break;
            accrue(k, now);
            st.busy += 1;
            const double dur =
                service_duration(cfg_.seed, k, item->id, cfg_.systems[k].service_time);
            heap_.push({now + dur, 0, seq_++, k, item->id});
        }
    }

    void offer(std::size_t k, WorkItem item, double now) {
        const auto b = bucket_of(now);
        ensure_bucket(b);
        acct_.systems[k].arrivals[b] += 1;
        flow_trace_.events.push_back({now, cfg_.systems[k].system_id, 1});
        if (queue_ && k == queue_stage_) {
            queue_->enqueue(std::move(item));
        } else {
            stages_[k].wait.push_back(std::move(item));
        }
        pump(k, now);
    }

    void on_completion(const Event& e) {
        const auto k = e.stage;
        accrue(k, e.t);
        stages_[k].busy -= 1;
        const auto b = bucket_of(e.t);
        ensure_bucket(b);
        acct_.systems[k].completions[b] += 1;
        acct_.systems[k].service_time_sum[b] +=
            service_duration(cfg_.seed, k, e.id, cfg_.systems[k].service_time);
        if (k + 1 < stages_.size()) {
            offer(k + 1, WorkItem{e.id, e.t, 1, cfg_.systems[k].system_id}, e.t);
        } else {
            completed_ += 1;
            latency_sum_ += e.t - gen_time_[e.id];
        }
        pump(k, e.t);
    }

    // Pipeline-earliest member of the group, never stage 0 (the queue
    // sits between stages, not in front of the source); stage 1 when
    // the group has no eligible member.
    std::size_t choose_queue_stage(const std::vector<CapacityScore>& group) const {
        std::size_t best = stages_.size();
        for (const auto& score : group)
            for (std::size_t k = 1; k < cfg_.systems.size(); ++k)
                if (cfg_.systems[k].system_id == score.system_id) best = std::min(best, k);
        return best < stages_.size() ? best : 1;
    }

    void install_queue(std::size_t b, double now) {
        install_bucket_ = b;
        bool partitioned = false;
        try {
            const auto warm = collect_metrics(acct_, 0, b);
            const auto totals = aggregate_stack(warm);
            for (const auto& m : warm) capacities_.push_back(compute_capacity(m, totals));
            partition_ = partition_systems(capacities_, cfg_.partition_k);
            partitioned = true;
        } catch (const std::exception& e) {
            capacities_.clear();
            log_debug(std::string("warm-up produced no usable capacities: ") + e.what());
        }

        PlacementPoint place{0, 0, true};
        queue_stage_ = 1;
        if (partitioned) {
            const auto hm = build_heatmap(flow_trace_, cfg_.bucket_width, system_order_, b);
            place = select_queue_position(hm, partition_);
            queue_stage_ = choose_queue_stage(partition_.sets[place.boundary_index + 1]);
        }
        partitioned_ = partitioned;
        queue_.emplace(cfg_.cap, place);

        auto& backlog = stages_[queue_stage_].wait;
        while (!backlog.empty()) {
            queue_->enqueue(std::move(backlog.front()));
            backlog.pop_front();
        }
        pump(queue_stage_, now);

        monitor_ = init_monitor();
        monitor_.anchor = queue_->anchor();
        log_info("queue installed at stage " + cfg_.systems[queue_stage_].system_id);
    }

    double capacity_ratio(std::size_t b) const {
        if (!partitioned_ || monitor_.anchor.group_index >= partition_.sets.size())
            return 0.0;
        try {
            const auto cum = collect_metrics(acct_, install_bucket_, b);
            const auto totals = aggregate_stack(cum);
            std::set<std::string> members;
            for (const auto& s : partition_.sets[monitor_.anchor.group_index])
                members.insert(s.system_id);
            double total = 0.0;
            double group = 0.0;
            for (const auto& m : cum) {
                const double c = compute_capacity(m, totals).c;
                total += c;
                if (members.count(m.system_id)) group += c;
            }
            return total > 0.0 ? group / total : 0.0;
        } catch (const std::exception&) {
            return 0.0;
        }
    }

    void observe_and_decide(std::size_t b, double now) {
        const auto& qa = acct_.systems[queue_stage_];
        Observation obs;
        obs.dt_i = b >= 2 ? static_cast<double>(qa.arrivals[b - 2]) : 0.0;
        obs.dt_next = static_cast<double>(qa.arrivals[b - 1]);
        const auto comps = qa.completions[b - 1];
        obs.service_demand =
            comps > 0 ? qa.busy_time[b - 1] / static_cast<double>(comps) : 0.0;
        obs.capacity_ratio = capacity_ratio(b);

        MonitorConfig mcfg;
        mcfg.cap = cfg_.cap;
        mcfg.levels = cfg_.quantize_levels;
        mcfg.d_max = cfg_.d_max;
        mcfg.eps = cfg_.eps_release;
        mcfg.growth_on = cfg_.growth_on;
        mcfg.trace_max_steps = cfg_.monitor_max_steps;

        auto res = monitor_step(monitor_, obs, mcfg);
        monitor_ = res.state;
        if (res.decision.kind == Decision::Kind::grow) {
            queue_->apply_growth(res.decision);
        } else if (res.decision.kind == Decision::Kind::migrate) {
            queue_->release_anchor();
            PlacementPoint next = queue_->placement();
            if (partitioned_) {
                const auto hm =
                    build_heatmap(flow_trace_, cfg_.bucket_width, system_order_, b);
                next = select_queue_position(hm, partition_);
            }
            // The relocation is placement metadata; the guarded stage
            // stays put, multi-queue topologies being out of scope.
            queue_->migrate(next, cfg_.migrate_reset);
            monitor_.anchor = queue_->anchor();
            log_info("queue migrated to boundary " + std::to_string(next.boundary_index));
        }
        pump(queue_stage_, now);
    }

    void record_spawn_plans(double) {
        std::uint64_t n = 0;
        for (const auto& s : cfg_.systems) n = std::max(n, s.d_m);
        if (n < 2) return;
        std::vector<std::uint64_t> growth;
        std::vector<double> demands;
        for (std::size_t k = 0; k < stages_.size(); ++k) {
            std::uint64_t occ = stages_[k].busy + stages_[k].wait.size();
            if (queue_ && k == queue_stage_) occ += queue_->occupancy();
            growth.push_back(occ);
            if (!(cfg_.systems[k].service_time.value > 0.0)) return;
            demands.push_back(cfg_.systems[k].service_time.value);
        }
        for (const auto& plan : apply_multiprogram(n, growth, demands, cfg_.theta))
            if (std::find(spawn_plans_.begin(), spawn_plans_.end(), plan) ==
                spawn_plans_.end())
                spawn_plans_.push_back(plan);
    }

    void on_tick(double now, std::size_t b) {
        for (std::size_t k = 0; k < stages_.size(); ++k) accrue(k, now);
        ensure_bucket(b);
        const double warmup_end = cfg_.warmup_fraction * cfg_.workload.duration;
        if (!queue_ && now >= warmup_end) install_queue(b, now);
        if (queue_ && b > install_bucket_) {
            if (policy_ == QueuePolicy::endurance) observe_and_decide(b, now);
            record_spawn_plans(now);
        }
        if (queue_) queue_->snapshot(now);
    }

    const SimConfig& cfg_;
    QueuePolicy policy_;

    std::vector<StageState> stages_;
    std::vector<std::string> system_order_;
    RunAccounting acct_;
    EventTrace flow_trace_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> heap_;
    std::uint64_t seq_ = 0;

    std::vector<double> gen_time_;
    std::uint64_t completed_ = 0;
    double latency_sum_ = 0.0;

    std::optional<EnduranceQueue> queue_;
    std::size_t queue_stage_ = 1;
    std::size_t install_bucket_ = 0;
    bool partitioned_ = false;
    DisjointPartition partition_;
    std::vector<CapacityScore> capacities_;
    MonitorState monitor_;
    std::vector<SpawnPlan> spawn_plans_;
};

SimReport Engine::run() {
    stages_.assign(cfg_.systems.size(), StageState{});
    acct_.bucket_width = cfg_.bucket_width;
    for (const auto& s : cfg_.systems) {
        SystemAccounting sa;
        sa.system_id = s.system_id;
        sa.servers = s.d_m;
        acct_.systems.push_back(std::move(sa));
        system_order_.push_back(s.system_id);
    }

    const auto arrivals = generate_workload(cfg_.workload);
    for (const auto& e : arrivals.events)
        for (std::uint64_t c = 0; c < e.item_count; ++c) {
            const auto id = static_cast<std::uint64_t>(gen_time_.size());
            gen_time_.push_back(e.timestamp);
            heap_.push({e.timestamp, 1, seq_++, 0, id});
        }

    std::size_t next_tick = 1;
    const auto fire_ticks_until = [&](double t) {
        while (static_cast<double>(next_tick) * cfg_.bucket_width <= t) {
            on_tick(static_cast<double>(next_tick) * cfg_.bucket_width, next_tick);
            next_tick += 1;
        }
    };

    double last_time = 0.0;
    while (!heap_.empty()) {
        const Event e = heap_.top();
        fire_ticks_until(e.t);
        heap_.pop();
        if (e.kind == 0)
            on_completion(e);
        else
            offer(0, WorkItem{e.id, e.t, 1, cfg_.workload.system_id}, e.t);
        last_time = std::max(last_time, e.t);
    }
    const double end_time = std::max(cfg_.workload.duration, last_time);
    fire_ticks_until(end_time);
    for (std::size_t k = 0; k < stages_.size(); ++k) accrue(k, end_time);
    ensure_bucket(bucket_of(end_time));

    SimReport report;
    report.per_system = collect_metrics(acct_, 0, acct_.buckets);
    report.capacities = capacities_;
    {
        auto hm = build_heatmap(flow_trace_, cfg_.bucket_width, system_order_, acct_.buckets);
        std::vector<std::vector<double>> demand(
            hm.buckets, std::vector<double>(system_order_.size(), 0.0));
        for (std::size_t b = 0; b < hm.buckets; ++b)
            for (std::size_t k = 0; k < acct_.systems.size(); ++k) {
                const auto comps = acct_.systems[k].completions[b];
                if (comps > 0)
                    demand[b][k] =
                        acct_.systems[k].busy_time[b] / static_cast<double>(comps);
            }
        report.heatmap = overlay_peak_demand(std::move(hm), demand, cfg_.peak_quantile);
    }
    if (queue_) report.queue_stats = queue_->stats();
    report.spawn_plans = spawn_plans_;
    report.end_to_end_throughput =
        static_cast<double>(completed_) / cfg_.workload.duration;
    report.mean_latency =
        completed_ > 0 ? latency_sum_ / static_cast<double>(completed_) : 0.0;
    report.generated = gen_time_.size();
    report.completed = completed_;
    report.dropped = queue_ ? queue_->stats().dropped : 0;
    std::uint64_t resident = queue_ ? queue_->occupancy() : 0;
    for (const auto& st : stages_) resident += st.busy + st.wait.size();
    report.in_flight = resident;
    return report;
}

} // namespace

SimReport run_simulation(const SimConfig& cfg, QueuePolicy policy) {
    Engine engine(cfg, policy);
    return engine.run();
}

BaselineComparison compare_baseline(const SimConfig& cfg) {
    return {run_simulation(cfg, QueuePolicy::endurance),
            run_simulation(cfg, QueuePolicy::fixed_depth)};
}

} // namespace endurq
