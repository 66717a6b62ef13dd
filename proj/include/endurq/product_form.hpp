#ifndef ENDURQ_PRODUCT_FORM_HPP
#define ENDURQ_PRODUCT_FORM_HPP

#include <cstdint>
#include <vector>

namespace endurq {

// Product-form model of a closed network: per-station relative service
// demands, population N, and the normalizing constants G(0..N).
struct ProductFormModel {
    std::vector<double> demands; // D_k > 0
    std::uint64_t population = 0;
    std::vector<double> g; // G(0..N), g[0] = 1
};

// Per-station growth-state occupancies Q_g_k; sums to N when used for
// a probability.
struct StateVector {
    std::vector<std::uint64_t> counts;
};

// Outcome of the dominance rule: spawn the dominating station's growth
// state across thread_count threads and zero the dominated one.
struct SpawnPlan {
    std::size_t target_station = 0;
    std::uint64_t thread_count = 0;
    std::size_t zeroed_station = 0;

    bool operator==(const SpawnPlan&) const = default;
};

// G(0..N) by convolution: g[0] = 1, then fold each station k with
// g[n] += D_k * g[n-1] for n = 1..N ascending. O(stations * N), no
// state enumeration. Throws on a non-positive demand.
std::vector<double> normalizing_constant(const std::vector<double>& demands,
                                         std::uint64_t population);

ProductFormModel make_product_form_model(std::vector<double> demands,
                                         std::uint64_t population);

// P(state) = prod_k D_k^{count_k} / G(N). Throws when the state's
// population does not match the model's.
double state_probability(const ProductFormModel& model, const StateVector& state);

// All compositions of N into `stations` non-negative parts, in
// lexicographic order. The brute-force counterpart of the convolution.
std::vector<StateVector> enumerate_states(std::size_t stations, std::uint64_t population);

// Dominance: q_j is at least theta times q_i, with q_i > 0 (nothing
// dominates zero by a multiplicative factor). Requires theta > 1.
bool dominates(std::uint64_t q_gi, std::uint64_t q_gj, double theta = 2.0);

// Threads for a triggered spawn: round-half-up(prob * q_gi), with a
// floor of 1 whenever the product is positive. Zero probability or
// zero growth spawns nothing.
std::uint64_t spawn_threads(double prob, std::uint64_t q_gi);

// Scale a growth-value vector to a fixed population: proportional
// shares with largest-remainder rounding (ties to the lower index).
// An all-zero vector is treated as uniform shares.
StateVector normalize_to_population(const std::vector<std::uint64_t>& growth_values,
                                    std::uint64_t population);

// The multiprogram mixing rule, end to end: N = d_m, G(N) from the
// demands, the observed growth vector normalized to N for its state
// probability, then every ordered dominance pair (i, j) emits a plan
// targeting j with spawn_threads(P(state), Q_g_i) threads and zeroes
// station i. Zeroed stations drop out of later pairs. Requires
// d_m >= 1 and aligned lists.
std::vector<SpawnPlan> apply_multiprogram(std::uint64_t d_m,
                                          const std::vector<std::uint64_t>& growth_values,
                                          const std::vector<double>& demands,
                                          double theta = 2.0);

} // namespace endurq

#endif
