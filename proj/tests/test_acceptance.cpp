// Acceptance gate: every release property in one binary, one verdict
// line each. Exits nonzero if any criterion fails.
#include "endurq/growth.hpp"
#include "endurq/heatmap.hpp"
#include "endurq/metrics.hpp"
#include "endurq/product_form.hpp"
#include "endurq/queue.hpp"
#include "endurq/serde.hpp"
#include "endurq/simulator.hpp"
#include "endurq/workload.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace endurq;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

std::string g_detail;

bool fail(const std::string& detail) {
    g_detail = detail;
    return false;
}

std::uint64_t naive_ackermann(std::uint64_t m, std::uint64_t n) {
    if (m == 0) return n + 1;
    if (n == 0) return naive_ackermann(m - 1, 1);
    return naive_ackermann(m - 1, naive_ackermann(m, n - 1));
}

// ---- 1: exact values against the recursion ----
bool ackermann_matches_oracle() {
    Timer timer;
    for (std::uint64_t m = 0; m <= 3; ++m)
        for (std::uint64_t n = 0; n <= 8; ++n) {
            const auto got = ackermann(m, n);
            const auto want = naive_ackermann(m, n);
            if (got.saturated || got.value != want)
                return fail("A(" + std::to_string(m) + "," + std::to_string(n) +
                            ") = " + std::to_string(got.value) + ", oracle " +
                            std::to_string(want));
        }
    for (std::uint64_t n = 0; n <= 1000000; ++n) {
        const auto got = ackermann(0, n, 1u << 21);
        if (got.saturated || got.value != n + 1)
            return fail("A(0," + std::to_string(n) + ") != n + 1");
    }
    if (ackermann(2, 1).value != 5) return fail("A(2,1) != 5");
    if (ackermann(3, 3).value != 61) return fail("A(3,3) != 61");
    if (timer.seconds() >= 1.0)
        return fail("took " + std::to_string(timer.seconds()) + "s, budget 1s");
    return true;
}

// ---- 2: explosive inputs saturate instead of recursing ----
bool saturation_terminates() {
    Timer timer;
    for (std::uint64_t cap : {1ull, 1ull << 10, 1ull << 20, 1ull << 30}) {
        const auto got = ackermann(4, 2, cap);
        if (!got.saturated || got.value != cap)
            return fail("A(4,2) at cap " + std::to_string(cap) + " not saturated");
    }
    if (timer.seconds() >= 1.0)
        return fail("took " + std::to_string(timer.seconds()) + "s, budget 1s");
    return true;
}

// ---- 3: monitor base cases and depth floor ----
bool monitor_base_cases() {
    const auto init = init_monitor();
    if (init.q_depth != 0) return fail("initial Q_d != 0");
    if (init.q_growth.value != 1 || init.q_growth.saturated)
        return fail("initial Q_g != 1");

    Observation idle{};
    const auto grew = monitor_step(init, idle);
    if (grew.decision.kind != Decision::Kind::grow || grew.decision.grow_to != 1 ||
        grew.state.q_depth != 1)
        return fail("idle observation from init did not grow 0 to 1");
    auto deep = init;
    deep.q_depth = 7;
    if (monitor_step(deep, idle).state.q_depth != 8)
        return fail("idle observation did not grow depth by exactly 1");

    MonitorConfig cfg;
    cfg.cap = 256;
    EnduranceQueue queue(cfg.cap, {});
    auto state = init_monitor();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        Observation obs;
        obs.dt_i = unit(rng) * 8.0;
        obs.dt_next = unit(rng) * 8.0;
        obs.service_demand = unit(rng) * 1.5;
        obs.capacity_ratio = unit(rng) * 1.2;
        const auto res = monitor_step(state, obs, cfg);
        state = res.state;
        if (res.decision.kind == Decision::Kind::grow) {
            if (res.decision.grow_to < 1) return fail("grow target below 1");
            queue.apply_growth(res.decision);
        } else if (res.decision.kind == Decision::Kind::migrate) {
            queue.release_anchor();
            queue.migrate(queue.placement());
            state.anchor = queue.anchor();
        }
        if (queue.depth() < 1)
            return fail("queue depth hit 0 at step " + std::to_string(i));
        if (queue.depth() > cfg.cap) return fail("queue depth exceeded cap");
    }
    return true;
}

// ---- 4: convolution equals state enumeration ----
bool convolution_matches_enumeration() {
    Timer timer;
    const double choices[] = {0.5, 1.0, 2.0};
    for (std::size_t stations = 1; stations <= 4; ++stations) {
        std::vector<std::size_t> pick(stations, 0);
        while (true) {
            std::vector<double> demands(stations);
            for (std::size_t k = 0; k < stations; ++k) demands[k] = choices[pick[k]];
            for (std::uint64_t n = 0; n <= 6; ++n) {
                const auto g = normalizing_constant(demands, n);
                double brute = 0.0;
                const auto model = make_product_form_model(demands, n);
                double prob_sum = 0.0;
                for (const auto& state : enumerate_states(stations, n)) {
                    double w = 1.0;
                    for (std::size_t k = 0; k < stations; ++k)
                        w *= std::pow(demands[k], static_cast<double>(state.counts[k]));
                    brute += w;
                    prob_sum += state_probability(model, state);
                }
                if (std::abs(g[n] - brute) > 1e-9 * std::max(1.0, std::abs(brute)))
                    return fail("G(N) mismatch at " + std::to_string(stations) +
                                " stations, N = " + std::to_string(n));
                if (std::abs(prob_sum - 1.0) > 1e-9)
                    return fail("state probabilities sum to " + std::to_string(prob_sum));
            }
            std::size_t k = 0;
            while (k < stations && ++pick[k] == 3) pick[k++] = 0;
            if (k == stations) break;
        }
    }
    if (timer.seconds() >= 10.0)
        return fail("took " + std::to_string(timer.seconds()) + "s, budget 10s");
    return true;
}

// ---- 5: capacity formula regression vector ----
bool capacity_regression_vector() {
    SystemMetrics m;
    m.system_id = "s";
    m.p = 50.0;
    m.u = 0.5;
    m.dt = 20.0;
    m.S = 0.1;
    m.window = {0.0, 1.0};
    const StackTotals t{200.0, 0.8, 100.0};
    const double worked = compute_capacity(m, t).c;
    if (std::abs(worked - 0.17625) > 1e-12)
        return fail("worked example gave " + std::to_string(worked));

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    for (int i = 0; i < 100; ++i) {
        SystemMetrics r;
        r.system_id = "r";
        r.p = unit(rng) * 120.0;
        r.u = unit(rng);
        r.D = unit(rng) * 4.0;
        r.dt = unit(rng) * 60.0;
        r.S = unit(rng);
        r.window = {0.0, 1.0};
        const StackTotals rt{unit(rng) * 500.0 + 0.5, unit(rng), unit(rng) * 300.0 + 0.5};
        const double independent = r.p / rt.P * (r.u / rt.U) + r.dt / rt.D_total * r.S;
        const double got = compute_capacity(r, rt).c;
        if (std::abs(got - independent) > 1e-12 * std::max(1.0, std::abs(independent)))
            return fail("randomized case " + std::to_string(i) + " diverged");
    }
    return true;
}

// ---- 6: conservation, order and depth bounds under load ----
bool queue_conservation() {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        const std::uint64_t cap = 1 + rng() % 128;
        EnduranceQueue q(cap, {});
        std::deque<std::uint64_t> fifo;
        std::uint64_t next_id = 0;
        for (int event = 0; event < 10000; ++event) {
            const auto roll = rng() % 100;
            if (roll < 50) {
                WorkItem item;
                item.id = next_id++;
                if (q.enqueue(item) == EnqueueResult::accepted) fifo.push_back(item.id);
            } else if (roll < 85) {
                const auto got = q.dequeue();
                if (got.has_value()) {
                    if (fifo.empty() || got->id != fifo.front())
                        return fail("FIFO order broken at seed " + std::to_string(seed));
                    fifo.pop_front();
                } else if (!fifo.empty()) {
                    return fail("dequeue lost items at seed " + std::to_string(seed));
                }
            } else if (roll < 95) {
                q.apply_growth({Decision::Kind::grow, 1 + rng() % (cap * 2)});
            } else {
                const auto st = q.snapshot(static_cast<double>(event));
                if (st.enqueued != st.dequeued + st.dropped + q.occupancy())
                    return fail("conservation broken at seed " + std::to_string(seed));
            }
            if (q.depth() < 1 || q.depth() > cap)
                return fail("depth left [1, cap] at seed " + std::to_string(seed));
        }
        const auto st = q.snapshot(1e9);
        if (st.enqueued != st.dequeued + st.dropped + q.occupancy())
            return fail("final conservation broken at seed " + std::to_string(seed));
    }
    return true;
}

SimConfig burst_config(std::uint64_t seed) {
    SimConfig cfg;
    SystemConfig ingest;
    ingest.system_id = "ingest";
    ingest.service_time = {ServiceTime::Kind::deterministic, 0.001};
    SystemConfig store;
    store.system_id = "store";
    store.service_time = {ServiceTime::Kind::deterministic, 0.1};
    cfg.systems = {ingest, store};
    cfg.workload.kind = WorkloadProfile::Kind::bursty;
    cfg.workload.base_rate = 2.0;
    cfg.workload.burst_rate = 50.0; // five times the store's 10/s service rate
    cfg.workload.burst_duration = 1.0;
    cfg.workload.period = 5.0;
    cfg.workload.duration = 30.0;
    cfg.workload.seed = seed;
    cfg.cap = 4096;
    cfg.d_max = 0.2;
    cfg.seed = seed;
    return cfg;
}

int run_to_file(const std::string& args, const std::string& out_path) {
    const std::string cmd =
        std::string(ENDURQ_BIN) + " " + args + " >" + out_path + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- 7: bitwise reproducibility, in process and across processes ----
bool reports_are_deterministic() {
    const auto cfg = burst_config(11);
    const auto first = to_json(run_simulation(cfg)).dump();
    const auto second = to_json(run_simulation(cfg)).dump();
    if (first != second) return fail("same-process reports differ");

    const char* kConfig = R"({
        "systems": [
            {"system_id": "ingest", "service_time": {"kind": "deterministic", "value": 0.001}},
            {"system_id": "store", "service_time": {"kind": "deterministic", "value": 0.1}}
        ],
        "workload": {"kind": "bursty", "base_rate": 2.0, "burst_rate": 50.0,
                     "burst_duration": 1.0, "period": 5.0, "duration": 30.0, "seed": 11},
        "cap": 4096,
        "d_max": 0.2,
        "seed": 11
    })";
    std::ofstream("acceptance_cfg_tmp.json") << kConfig;
    const int code_a = run_to_file("simulate acceptance_cfg_tmp.json", "acceptance_a_tmp.json");
    const int code_b = run_to_file("simulate acceptance_cfg_tmp.json", "acceptance_b_tmp.json");
    const auto out_a = read_file("acceptance_a_tmp.json");
    const auto out_b = read_file("acceptance_b_tmp.json");
    std::remove("acceptance_cfg_tmp.json");
    std::remove("acceptance_a_tmp.json");
    std::remove("acceptance_b_tmp.json");
    if (code_a != 0 || code_b != 0)
        return fail("subprocess exited " + std::to_string(code_a) + "/" +
                    std::to_string(code_b));
    if (out_a.empty() || out_a != out_b) return fail("cross-process outputs differ");
    return true;
}

// ---- 8: adaptive depth beats the fixed baseline on bursts ----
bool adaptive_depth_reduces_drops() {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto cmp = compare_baseline(burst_config(seed));
        if (cmp.endurance.generated != cmp.fixed.generated)
            return fail("arms diverged on workload at seed " + std::to_string(seed));
        if (cmp.endurance.dropped >= cmp.fixed.dropped)
            return fail("seed " + std::to_string(seed) + ": adaptive dropped " +
                        std::to_string(cmp.endurance.dropped) + ", fixed " +
                        std::to_string(cmp.fixed.dropped));
    }
    return true;
}

// ---- 9: heat map density conserves items and survives CSV ----
bool heatmap_conserves_density() {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> ts(0.0, 60.0);
    const std::vector<std::string> ids{"a", "b", "c", "d"};
    for (int trial = 0; trial < 50; ++trial) {
        EventTrace trace;
        const std::size_t count = 1 + rng() % 300;
        for (std::size_t i = 0; i < count; ++i) {
            TraceEvent e;
            e.timestamp = ts(rng);
            e.system_id = ids[rng() % ids.size()];
            e.item_count = 1 + rng() % 4;
            trace.events.push_back(e);
        }
        const auto hm = build_heatmap(trace, 0.5 + static_cast<double>(rng() % 3), ids);
        if (hm.total_density() != trace.total_items())
            return fail("density " + std::to_string(hm.total_density()) + " != items " +
                        std::to_string(trace.total_items()));

        std::istringstream round(export_heatmap(hm, HeatMapFormat::csv));
        const auto back = import_heatmap_csv(round, hm.bucket_width);
        if (back.density != hm.density || back.systems != hm.systems ||
            back.buckets != hm.buckets)
            return fail("csv round-trip lost data at trial " + std::to_string(trial));
    }
    return true;
}

// ---- 10: partition ordering on distinct scores, flags on ties ----
bool partition_validity() {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 11;
        std::vector<CapacityScore> scores;
        for (std::size_t i = 0; i < n; ++i)
            scores.push_back({"s" + std::to_string(i),
                              static_cast<double>(i + 1) + static_cast<double>(rng() % 7) / 16.0});
        std::shuffle(scores.begin(), scores.end(), rng);
        const std::size_t k = 2 + rng() % (n - 1);
        const auto part = partition_systems(scores, k);
        if (part.degenerate())
            return fail("distinct scores flagged degenerate at trial " +
                        std::to_string(trial));
        for (std::size_t g = 0; g + 1 < part.sets.size(); ++g) {
            const double sup_lo = part.sets[g].back().c;
            const double sup_hi = part.sets[g + 1].back().c;
            if (!(sup_lo < sup_hi))
                return fail("sup ordering violated at boundary " + std::to_string(g));
        }
    }

    for (std::size_t n : {3ull, 5ull, 9ull}) {
        std::vector<CapacityScore> tied;
        for (std::size_t i = 0; i < n; ++i) tied.push_back({"t" + std::to_string(i), 0.3});
        for (std::size_t k = 2; k <= n; ++k) {
            const auto part = partition_systems(tied, k);
            if (!part.degenerate())
                return fail("tied scores not flagged at n = " + std::to_string(n));
        }
    }
    return true;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        bool (*check)();
    };
    const Criterion criteria[] = {
        {"ackermann values match the naive recursion", ackermann_matches_oracle},
        {"explosive ackermann inputs saturate quickly", saturation_terminates},
        {"monitor starts at zero and never destroys the queue", monitor_base_cases},
        {"convolution agrees with state enumeration", convolution_matches_enumeration},
        {"capacity formula reproduces the regression vector", capacity_regression_vector},
        {"queue conserves items in FIFO order within bounds", queue_conservation},
        {"identical configs give byte-identical reports", reports_are_deterministic},
        {"adaptive depth drops less than the fixed baseline", adaptive_depth_reduces_drops},
        {"heat map density equals trace items and round-trips", heatmap_conserves_density},
        {"partitions order groups by sup and flag ties", partition_validity},
    };

    int failures = 0;
    int index = 0;
    for (const auto& criterion : criteria) {
        ++index;
        bool ok = false;
        g_detail.clear();
        try {
            ok = criterion.check();
        } catch (const std::exception& e) {
            g_detail = std::string("threw: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("criterion %2d %s %s%s%s\n", index, ok ? "PASS" : "FAIL",
                    criterion.name, g_detail.empty() ? "" : ": ", g_detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
