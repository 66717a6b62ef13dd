#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "endurq/growth.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

using namespace endurq;

namespace {

// Textbook recursion, usable only where it terminates quickly.
std::uint64_t naive(std::uint64_t m, std::uint64_t n) {
    if (m == 0) return n + 1;
    if (n == 0) return naive(m - 1, 1);
    return naive(m - 1, naive(m, n - 1));
}

// Records a value each time an application bottoms out at A(0, x);
// rewrites of A(m, 0) resolve through A(m-1, 1) without a record.
std::uint64_t trace_oracle(std::uint64_t m, std::uint64_t n, std::vector<std::uint64_t>& out) {
    if (m == 0) {
        out.push_back(n + 1);
        return n + 1;
    }
    if (n == 0) return trace_oracle(m - 1, 1, out);
    const auto inner = trace_oracle(m, n - 1, out);
    return trace_oracle(m - 1, inner, out);
}

} // namespace

TEST_CASE("ackermann matches naive recursion for m <= 3") {
    for (std::uint64_t m = 0; m <= 3; ++m)
        for (std::uint64_t n = 0; n <= 8; ++n) {
            const auto got = ackermann(m, n);
            CHECK(got.value == naive(m, n));
            CHECK_FALSE(got.saturated);
        }
    CHECK(ackermann(2, 1, 1000000).value == 5);
    CHECK(ackermann(3, 3, 1000000).value == 61);
}

TEST_CASE("ackermann base row is n + 1") {
    for (std::uint64_t n : {0ull, 1ull, 99ull, 65535ull, 1000000ull})
        CHECK(ackermann(0, n, kMaxCap) == SaturatingValue{n + 1, false});
}

TEST_CASE("ackermann finite cases above m = 3") {
    CHECK(ackermann(4, 0, kMaxCap) == SaturatingValue{13, false});
    CHECK(ackermann(4, 1, kMaxCap) == SaturatingValue{65533, false});
    CHECK(ackermann(5, 0, kMaxCap) == SaturatingValue{65533, false});
    CHECK(ackermann(4, 2, kMaxCap) == SaturatingValue{kMaxCap, true});
    CHECK(ackermann(5, 1, kMaxCap) == SaturatingValue{kMaxCap, true});
    CHECK(ackermann(6, 0, kMaxCap) == SaturatingValue{kMaxCap, true});
    CHECK(ackermann(9, 9, kMaxCap) == SaturatingValue{kMaxCap, true});
}

TEST_CASE("ackermann saturates exactly when the value reaches cap") {
    CHECK(ackermann(2, 5, 14) == SaturatingValue{13, false});
    CHECK(ackermann(2, 5, 13) == SaturatingValue{13, true});
    CHECK(ackermann(2, 5, 4) == SaturatingValue{4, true});
    CHECK(ackermann(3, 59, kMaxCap) == SaturatingValue{(1ull << 62) - 3, false});
    CHECK(ackermann(3, 60, kMaxCap) == SaturatingValue{kMaxCap, true});
    CHECK(ackermann(0, 0, 1) == SaturatingValue{1, true});
    for (std::uint64_t cap : {1ull, 2ull, 1024ull, 1ull << 20, 1ull << 30})
        CHECK(ackermann(4, 2, cap) == SaturatingValue{cap, true});
}

TEST_CASE("ackermann rejects caps outside [1, 2^62]") {
    CHECK_THROWS_AS(ackermann(1, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(ackermann(1, 1, kMaxCap + 1), std::invalid_argument);
    CHECK_NOTHROW(ackermann(1, 1, kMaxCap));
    CHECK_THROWS_AS(ackermann_trace(1, 1, 0), std::invalid_argument);
}

TEST_CASE("trace matches the recursive interpreter oracle") {
    for (std::uint64_t m = 0; m <= 3; ++m)
        for (std::uint64_t n = 0; n <= 3; ++n) {
            std::vector<std::uint64_t> expected;
            const auto value = trace_oracle(m, n, expected);
            const auto got = ackermann_trace(m, n, kMaxCap, 1u << 22);
            REQUIRE_FALSE(got.truncated);
            REQUIRE(got.steps.size() == expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i) {
                CHECK(got.steps[i].value == expected[i]);
                CHECK_FALSE(got.steps[i].saturated);
            }
            CHECK(got.steps.back().value == value);
            CHECK(value == naive(m, n));
        }
}

TEST_CASE("trace worked examples") {
    const auto a07 = ackermann_trace(0, 7);
    REQUIRE(a07.steps.size() == 1);
    CHECK(a07.steps[0].value == 8);

    const auto a11 = ackermann_trace(1, 1);
    REQUIRE(a11.steps.size() == 2);
    CHECK(a11.steps[0].value == 2);
    CHECK(a11.steps[1].value == 3);

    const auto a21 = ackermann_trace(2, 1);
    const std::vector<std::uint64_t> want{2, 3, 2, 3, 4, 5};
    REQUIRE(a21.steps.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(a21.steps[i].value == want[i]);
    CHECK_FALSE(a21.truncated);
}

TEST_CASE("trace truncation appends the resolved value") {
    const auto t = ackermann_trace(4, 2, 1u << 20, 4096);
    CHECK(t.truncated);
    REQUIRE(t.steps.size() == 4097);
    CHECK(t.steps.back() == SaturatingValue{1u << 20, true});
    CHECK(t.steps.back() == ackermann(4, 2, 1u << 20));

    const auto zero = ackermann_trace(2, 2, kDefaultCap, 0);
    CHECK(zero.truncated);
    REQUIRE(zero.steps.size() == 1);
    CHECK(zero.steps[0] == ackermann(2, 2));
}

TEST_CASE("trace saturation resolves enclosing applications at cap") {
    const auto t = ackermann_trace(2, 1, 4, 1u << 10);
    CHECK_FALSE(t.truncated);
    REQUIRE_FALSE(t.steps.empty());
    CHECK(t.steps.back() == SaturatingValue{4, true});
    for (const auto& s : t.steps) {
        CHECK(s.value <= 4);
        CHECK(s.saturated == (s.value == 4));
    }

    const auto start_above = ackermann_trace(1, 9, 5, 1u << 10);
    REQUIRE(start_above.steps.size() == 1);
    CHECK(start_above.steps[0] == SaturatingValue{5, true});
}

TEST_CASE("quantize_demand maps onto [0, levels]") {
    CHECK(quantize_demand(0.0, 4, 1.0) == 0);
    CHECK(quantize_demand(0.4, 4, 1.0) == 1);
    CHECK(quantize_demand(0.99, 4, 1.0) == 3);
    CHECK(quantize_demand(1.0, 4, 1.0) == 4);
    CHECK(quantize_demand(7.5, 4, 1.0) == 4);
    CHECK(quantize_demand(0.1, 1, 2.0) == 0);
    CHECK_THROWS_AS(quantize_demand(-0.1, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(quantize_demand(std::nan(""), 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(quantize_demand(0.5, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(quantize_demand(0.5, 4, 0.0), std::invalid_argument);
}

TEST_CASE("monitor init state") {
    const auto s = init_monitor();
    CHECK(s.q_depth == 0);
    CHECK(s.q_growth == SaturatingValue{1, false});
    CHECK_FALSE(s.anchor.released);
}

TEST_CASE("monitor grows by one on an idle demand observation") {
    auto s = init_monitor();
    Observation idle{};
    idle.dt_i = 3.0;
    idle.dt_next = 1.0;
    const auto r1 = monitor_step(s, idle);
    CHECK(r1.decision.kind == Decision::Kind::grow);
    CHECK(r1.decision.grow_to == 1);
    CHECK(r1.state.q_depth == 1);
    const auto r2 = monitor_step(r1.state, idle);
    CHECK(r2.decision.grow_to == 2);
    CHECK(r2.state.q_depth == 2);
    CHECK(r2.state.trace.steps.empty());
}

TEST_CASE("monitor migration preempts growth") {
    auto s = init_monitor();
    Observation obs{};
    obs.service_demand = 0.0; // would grow if migration did not win
    obs.capacity_ratio = 1.0;
    const auto r = monitor_step(s, obs);
    CHECK(r.decision.kind == Decision::Kind::migrate);
    CHECK(r.state.anchor.released);
    CHECK(r.state.q_depth == 0);

    obs.capacity_ratio = 1.005;
    CHECK(monitor_step(s, obs).decision.kind == Decision::Kind::migrate);
    obs.capacity_ratio = 1.8;
    CHECK(monitor_step(s, obs).decision.kind == Decision::Kind::migrate);
    obs.capacity_ratio = 0.98;
    CHECK(monitor_step(s, obs).decision.kind == Decision::Kind::grow);
}

TEST_CASE("monitor walks the reduction trace on density drops") {
    auto s = init_monitor();
    Observation obs{};
    obs.dt_i = 5.0;
    obs.dt_next = 2.0;
    obs.service_demand = 0.5; // level 2 of 4
    obs.capacity_ratio = 0.3;

    auto r = monitor_step(s, obs);
    CHECK(r.state.demand_level == 2);
    CHECK(r.state.trace.m == 2);
    CHECK(r.state.trace.n == 0);
    // A(2, 0) reduces through [2, 3]; the first step grows to 2 + 1.
    CHECK(r.decision.kind == Decision::Kind::grow);
    CHECK(r.state.q_depth == 3);
    CHECK(r.state.q_growth == SaturatingValue{3, false});

    r = monitor_step(r.state, obs);
    CHECK(r.state.q_depth == 4);
    CHECK(r.state.trace_pos == 2);

    // Trace exhausted: the next qualifying step rebuilds at (level, Q_d).
    r = monitor_step(r.state, obs);
    CHECK(r.state.trace.n == 4);
    CHECK(r.state.trace_pos == 1);

    // A level change also rebuilds.
    obs.service_demand = 0.9; // level 3
    r = monitor_step(r.state, obs);
    CHECK(r.state.demand_level == 3);
    CHECK(r.state.trace.m == 3);
}

TEST_CASE("monitor holds on non-qualifying and invalid observations") {
    auto s = init_monitor();
    s.q_depth = 5;
    Observation obs{};
    obs.dt_i = 1.0;
    obs.dt_next = 4.0; // rising density, drop mode
    obs.service_demand = 0.5;
    obs.capacity_ratio = 0.2;
    auto r = monitor_step(s, obs);
    CHECK(r.decision.kind == Decision::Kind::hold);
    CHECK(r.state.q_depth == 5);

    MonitorConfig rise;
    rise.growth_on = GrowthOn::density_rise;
    r = monitor_step(s, obs, rise);
    CHECK(r.decision.kind == Decision::Kind::grow);

    obs.dt_next = -1.0;
    r = monitor_step(s, obs);
    CHECK(r.decision.kind == Decision::Kind::hold);
    obs.dt_next = std::nan("");
    r = monitor_step(s, obs);
    CHECK(r.decision.kind == Decision::Kind::hold);
    CHECK(r.state.q_depth == 5);
}

TEST_CASE("monitor depth is monotone and capped under random observations") {
    MonitorConfig cfg;
    cfg.cap = 512;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto s = init_monitor();
    std::uint64_t prev = s.q_depth;
    for (int i = 0; i < 100000; ++i) {
        Observation obs;
        obs.dt_i = unit(rng) * 10.0;
        obs.dt_next = unit(rng) * 10.0;
        obs.service_demand = unit(rng) * 2.0;
        obs.capacity_ratio = unit(rng) * 0.9; // anchored runs stay below release
        auto r = monitor_step(s, obs, cfg);
        REQUIRE(r.state.q_depth >= prev);
        REQUIRE(r.state.q_depth <= cfg.cap);
        if (r.decision.kind == Decision::Kind::grow) REQUIRE(r.decision.grow_to >= 1);
        prev = r.state.q_depth;
        s = r.state;
    }
    CHECK(s.q_depth == cfg.cap);
}

TEST_CASE("long_run_growth_index sums window products") {
    CHECK(long_run_growth_index({{2, 3}, {4}}) == SaturatingValue{10, false});
    CHECK(long_run_growth_index({{2, 3}, {}, {4}}) == SaturatingValue{10, false});
    CHECK(long_run_growth_index({}) == SaturatingValue{0, false});
    CHECK(long_run_growth_index({{2, 3}, {4}}, 10) == SaturatingValue{10, true});
    CHECK(long_run_growth_index({{0, 9}}) == SaturatingValue{0, false});
    CHECK_THROWS_AS(long_run_growth_index({{1}}, 0), std::invalid_argument);
}
