#include "etune/counters.hpp"

#include <algorithm>

#include "etune/errors.hpp"

namespace etune {

CounterSet derive_counters(const OperatorSpec& op, const Schedule& s,
                           const DeviceConfig& dev) {
    validate_schedule(op, s);
    const LoopNest nest = op.nest();

    const std::int64_t bt_batch = s.spatial[0].block_tile();
    const std::int64_t bt_m = s.spatial[1].block_tile();
    const std::int64_t bt_n = s.spatial[2].block_tile();
    const std::int64_t pt_batch = s.spatial[0].per_thread;
    const std::int64_t pt_m = s.spatial[1].per_thread;
    const std::int64_t pt_n = s.spatial[2].per_thread;

    CounterSet c;
    c.grid = s.grid_size();
    c.block = s.block_size();

    const std::int64_t steps = s.reduction_steps(nest.k);
    const std::int64_t outputs = nest.batch * nest.m * nest.n;

    // one multiply + one add per reduction element of every output
    c.flops = 2 * outputs * nest.k;

    // operand tiles staged per block per reduction step
    const std::int64_t tile_elems = bt_batch * s.k_tile * (bt_m + bt_n);
    c.glb_ld = c.grid * steps * tile_elems;
    c.shared_st = c.glb_ld;

    // per reduction iteration each thread reads its operand fragments
    c.shared_ld = c.grid * c.block * nest.k * pt_batch * (pt_m + pt_n);
    c.int_ops = c.shared_ld;

    // accumulators live in registers; every output stored once
    c.glb_st = outputs;

    c.active_sms = std::min<std::int64_t>(c.grid, dev.num_sms);
    c.sm_efficiency =
        (static_cast<double>(c.active_sms) / dev.num_sms) *
        std::min(1.0, static_cast<double>(c.block) /
                          DeviceConfig::kOccupancyBlockDivisor);
    return c;
}

} // namespace etune
