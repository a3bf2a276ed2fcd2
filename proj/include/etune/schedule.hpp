#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "etune/opspec.hpp"

namespace etune {

// Two-level tiling of one spatial loop. The extent is factored exactly as
//   extent = blocks * threads * per_thread
// where `blocks` is the number of block tiles along the loop, `threads` the
// number of thread tiles inside a block tile, and `per_thread` the elements
// each thread owns along the loop.
struct DimTiling {
    std::int64_t blocks = 1;
    std::int64_t threads = 1;
    std::int64_t per_thread = 1;

    std::int64_t extent() const { return blocks * threads * per_thread; }
    std::int64_t block_tile() const { return threads * per_thread; }

    bool operator==(const DimTiling&) const = default;
};

inline constexpr int kMaxBlockThreads = 1024;

// All scheduling decisions for one candidate kernel over the lowered nest:
// spatial tilings (batch, m, n), the reduction tile extent, unroll depth and
// vectorize width.
//
// Legality rules (IllegalSchedule otherwise):
//   - each spatial tiling factors its extent exactly
//   - k_tile divides the reduction extent; steps = K / k_tile
//   - block size (product of `threads`) in [1, 1024]
//   - unroll is a power of two dividing k_tile
//   - vectorize in {1,2,4} and divides the innermost per-thread extent
//     (the n-dimension per_thread)
struct Schedule {
    std::array<DimTiling, 3> spatial; // batch, m, n
    std::int64_t k_tile = 1;
    std::int64_t unroll = 1;
    std::int64_t vectorize = 1;

    std::int64_t grid_size() const {
        return spatial[0].blocks * spatial[1].blocks * spatial[2].blocks;
    }
    std::int64_t block_size() const {
        return spatial[0].threads * spatial[1].threads * spatial[2].threads;
    }
    std::int64_t reduction_steps(std::int64_t k_extent) const {
        return k_extent / k_tile;
    }

    bool operator==(const Schedule&) const = default;
};

// True when `s` is legal for the lowered nest of `op`.
bool schedule_is_legal(const OperatorSpec& op, const Schedule& s);

// Throws IllegalSchedule with a description of the violated rule.
void validate_schedule(const OperatorSpec& op, const Schedule& s);

// One block tile, one thread, all work per-thread, single reduction step.
// For an all-ones nest this is the all-factors-one schedule.
Schedule trivial_schedule(const OperatorSpec& op);

// JSON of the form
//   {"spatial":[[b,t,p],[b,t,p],[b,t,p]],"k_tile":4,"unroll":2,"vectorize":1}
std::string schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const std::string& text);

} // namespace etune
