#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "etune/opspec.hpp"
#include "etune/schedule.hpp"

namespace etune {

// Caps on the enumerated knob ranges. The block-thread cap may be tightened
// below the hard 1024 limit but never loosened past it.
struct SpaceLimits {
    std::int64_t max_block_threads = kMaxBlockThreads;
    std::int64_t max_unroll = 8;
    std::int64_t max_vectorize = 4;
};

// One candidate kernel: the schedule plus a content-derived identity.
// `id` is a pure function of (op, schedule); lineage holds 0, 1 or 2 parent
// ids depending on how the candidate was produced.
struct Candidate {
    std::uint64_t id = 0;
    OperatorSpec op;
    Schedule schedule;
    std::vector<std::uint64_t> lineage;
};

// FNV-1a over the canonical integer encoding of (op, schedule).
std::uint64_t candidate_id(const OperatorSpec& op, const Schedule& s);

Candidate make_candidate(const OperatorSpec& op, const Schedule& s,
                         std::vector<std::uint64_t> lineage = {});

// Ordered factorizations extent = blocks * threads * per_thread, enumerated
// in a fixed deterministic order (blocks ascending, then threads).
std::vector<DimTiling> enumerate_dim_tilings(std::int64_t extent);

std::vector<std::int64_t> divisors(std::int64_t extent);

// Lazy enumeration of every legal schedule for `op` under `limits`, in a
// fixed deterministic order. Yields nothing once exhausted.
class ScheduleEnumerator {
public:
    ScheduleEnumerator(const OperatorSpec& op, const SpaceLimits& limits);

    std::optional<Schedule> next();

private:
    bool advance();
    Schedule current() const;
    bool current_is_legal() const;

    OperatorSpec op_;
    SpaceLimits limits_;
    std::array<std::vector<DimTiling>, 3> tilings_;
    std::vector<std::int64_t> k_tiles_;
    std::vector<std::int64_t> unrolls_;
    std::vector<std::int64_t> vectors_;
    // odometer: [dim0, dim1, dim2, k, unroll, vectorize]
    std::array<std::size_t, 6> index_{};
    bool fresh_ = true;
    bool done_ = false;
};

// Number of legal schedules, counted lazily; stops early once `cap` is
// reached (0 = count everything).
std::int64_t count_schedules(const OperatorSpec& op, const SpaceLimits& limits,
                             std::int64_t cap = 0);

// Materializes the whole space. Intended for small spaces (oracles,
// brute-force sweeps).
std::vector<Schedule> enumerate_all_schedules(const OperatorSpec& op,
                                              const SpaceLimits& limits);

// `n` distinct legal candidates, reproducible for a fixed seed.
// Throws SpaceExhausted when fewer than `n` legal schedules exist.
std::vector<Candidate> sample_random(const OperatorSpec& op, std::int64_t n,
                                     std::uint64_t rng_seed,
                                     const SpaceLimits& limits = {});

} // namespace etune
