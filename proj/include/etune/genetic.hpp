#pragma once

#include <bitset>
#include <cstdint>
#include <random>
#include <vector>

#include "etune/space.hpp"

namespace etune {

// Per-offspring probabilities of the three reproduction moves. Values are
// normalized by their sum before use.
struct GeneticRates {
    double mutation = 0.85;
    double crossover = 0.10;
    double copy = 0.05;
};

// Knob groups exchanged whole during crossover.
enum class Knob : int {
    BatchTiling = 0,
    MTiling = 1,
    NTiling = 2,
    Reduction = 3,
    Unroll = 4,
    Vectorize = 5,
};
inline constexpr int kNumKnobs = 6;

// Takes each knob group from `b` where the mask bit is set, else from `a`.
// The result may violate cross-knob constraints; callers repair it.
Schedule crossover_with_mask(const Schedule& a, const Schedule& b,
                             std::bitset<kNumKnobs> take_from_b);

// Resamples `knob` to a random legal value, different from the current one
// whenever an alternative exists.
Schedule mutate_knob(const OperatorSpec& op, const Schedule& s, Knob knob,
                     const SpaceLimits& limits, std::mt19937_64& rng);

// Resamples violating knobs until the schedule is legal.
Schedule repair_schedule(const OperatorSpec& op, Schedule s,
                         const SpaceLimits& limits, std::mt19937_64& rng);

// Produces `n` legal offspring from `parents` by mutation, crossover and
// copy. Parents must be non-empty and share one OperatorSpec. Deterministic
// for a fixed seed; offspring lineage records the parent ids used.
std::vector<Candidate> reproduce(const std::vector<Candidate>& parents,
                                 std::int64_t n, const GeneticRates& rates,
                                 std::uint64_t rng_seed,
                                 const SpaceLimits& limits = {});

} // namespace etune
