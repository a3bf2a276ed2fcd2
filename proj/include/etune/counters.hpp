#pragma once

#include <cstdint>

#include "etune/device.hpp"
#include "etune/opspec.hpp"
#include "etune/schedule.hpp"

namespace etune {

// Execution counters derived from (operator, schedule). Memory counts are
// element transactions, not sectors.
struct CounterSet {
    std::int64_t grid = 0;
    std::int64_t block = 0;
    std::int64_t flops = 0;
    std::int64_t int_ops = 0;
    std::int64_t glb_ld = 0;
    std::int64_t glb_st = 0;
    std::int64_t shared_ld = 0;
    std::int64_t shared_st = 0;
    double sm_efficiency = 0.0;
    std::int64_t active_sms = 0;

    bool operator==(const CounterSet&) const = default;
};

// Analytic counter model for the tiled nest:
//   - each block cooperatively stages its operand tiles in shared memory
//     once per reduction step (counted as glb_ld and shared_st),
//   - threads read operand fragments from shared memory per reduction
//     iteration (shared_ld, one addressing int op each),
//   - outputs accumulate in registers and are stored exactly once (glb_st).
// Throws IllegalSchedule when the schedule does not fit the operator.
CounterSet derive_counters(const OperatorSpec& op, const Schedule& s,
                           const DeviceConfig& dev);

// Loop-nest interpreter oracle: executes the tiled nest with explicit
// shared-memory tile state and real data, counting every transaction as it
// happens and checking the computed output against a naive evaluation.
// Ground truth for derive_counters at tiny sizes.
// Throws TooLarge when the lowered extent product exceeds 2^16.
CounterSet interpret_counters(const OperatorSpec& op, const Schedule& s,
                              const DeviceConfig& dev = DeviceConfig::a100_like());

} // namespace etune
