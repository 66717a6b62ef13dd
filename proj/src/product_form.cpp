#include "endurq/product_form.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace endurq {

std::vector<double> normalizing_constant(const std::vector<double>& demands,
                                         std::uint64_t population) {
    for (auto d : demands)
        if (!(d > 0.0) || !std::isfinite(d))
            throw std::invalid_argument("normalizing_constant: demands must be positive");
    std::vector<double> g(population + 1, 0.0);
    g[0] = 1.0;
    for (auto d : demands)
        for (std::uint64_t n = 1; n <= population; ++n) g[n] += d * g[n - 1];
    return g;
}

ProductFormModel make_product_form_model(std::vector<double> demands,
                                         std::uint64_t population) {
    ProductFormModel model;
    model.g = normalizing_constant(demands, population);
    model.demands = std::move(demands);
    model.population = population;
    return model;
}

double state_probability(const ProductFormModel& model, const StateVector& state) {
    if (state.counts.size() != model.demands.size())
        throw std::invalid_argument("state_probability: station count mismatch");
    const auto total = std::accumulate(state.counts.begin(), state.counts.end(),
                                       std::uint64_t{0});
    if (total != model.population)
        throw std::invalid_argument("state_probability: state population mismatch");
    double weight = 1.0;
    for (std::size_t k = 0; k < state.counts.size(); ++k)
        weight *= std::pow(model.demands[k], static_cast<double>(state.counts[k]));
    return weight / model.g.back();
}

namespace {

void enumerate_rec(std::size_t station, std::uint64_t remaining,
                   std::vector<std::uint64_t>& current,
                   std::vector<StateVector>& out) {
    if (station + 1 == current.size()) {
        current[station] = remaining;
        out.push_back(StateVector{current});
        return;
    }
    for (std::uint64_t c = 0; c <= remaining; ++c) {
        current[station] = c;
        enumerate_rec(station + 1, remaining - c, current, out);
    }
}

} // namespace

std::vector<StateVector> enumerate_states(std::size_t stations, std::uint64_t population) {
    std::vector<StateVector> out;
    if (stations == 0) {
        if (population == 0) out.push_back(StateVector{});
        return out;
    }
    std::vector<std::uint64_t> current(stations, 0);
    enumerate_rec(0, population, current, out);
    return out;
}

bool dominates(std::uint64_t q_gi, std::uint64_t q_gj, double theta) {
    if (!(theta > 1.0))
        throw std::invalid_argument("dominates: theta must be > 1");
    return q_gi > 0 &&
           static_cast<double>(q_gj) >= theta * static_cast<double>(q_gi);
}

std::uint64_t spawn_threads(double prob, std::uint64_t q_gi) {
    if (!(prob >= 0.0) || prob > 1.0)
        throw std::invalid_argument("spawn_threads: probability must be in [0, 1]");
    const double product = prob * static_cast<double>(q_gi);
    if (!(product > 0.0)) return 0;
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(product + 0.5)));
}

StateVector normalize_to_population(const std::vector<std::uint64_t>& growth_values,
                                    std::uint64_t population) {
    if (growth_values.empty())
        throw std::invalid_argument("normalize_to_population: no stations");
    const std::size_t s = growth_values.size();

    unsigned __int128 total = 0;
    for (auto v : growth_values) total += v;

    StateVector state;
    state.counts.assign(s, 0);
    // Exact shares v*N/total; remainders compared by numerator since
    // the denominator is shared. An all-zero input gets uniform shares.
    std::vector<unsigned __int128> remainder(s, 0);
    std::uint64_t assigned = 0;
    for (std::size_t k = 0; k < s; ++k) {
        const unsigned __int128 numer =
            total == 0 ? population
                       : static_cast<unsigned __int128>(growth_values[k]) * population;
        const unsigned __int128 denom = total == 0 ? s : total;
        state.counts[k] = static_cast<std::uint64_t>(numer / denom);
        remainder[k] = numer % denom;
        assigned += state.counts[k];
    }

    std::vector<std::size_t> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < population; ++i)
        state.counts[order[i % s]] += 1, ++assigned;
    return state;
}

std::vector<SpawnPlan> apply_multiprogram(std::uint64_t d_m,
                                          const std::vector<std::uint64_t>& growth_values,
                                          const std::vector<double>& demands,
                                          double theta) {
    if (d_m < 1)
        throw std::invalid_argument("apply_multiprogram: d_m must be >= 1");
    if (growth_values.size() != demands.size() || growth_values.empty())
        throw std::invalid_argument("apply_multiprogram: growth and demand lists must align");

    const auto model = make_product_form_model(demands, d_m);
    const auto state = normalize_to_population(growth_values, d_m);
    const double prob = state_probability(model, state);

    std::vector<SpawnPlan> plans;
    std::vector<std::uint64_t> plan_state = growth_values;
    for (std::size_t i = 0; i < plan_state.size(); ++i) {
        for (std::size_t j = 0; j < plan_state.size(); ++j) {
            if (i == j) continue;
            if (!dominates(plan_state[i], plan_state[j], theta)) continue;
            plans.push_back(SpawnPlan{j, spawn_threads(prob, plan_state[i]), i});
            plan_state[i] = 0;
        }
    }
    return plans;
}

} // namespace endurq
