#include "etune/features.hpp"

#include <cmath>

namespace etune {

const std::array<const char*, kFeatureDim> kFeatureNames = {
    "log1p_flops",     "log1p_int_ops",   "log1p_glb_ld",
    "log1p_glb_st",    "log1p_shared_ld", "log1p_shared_st",
    "vectorize",       "unroll",          "log1p_loop_levels",
    "log1p_inner_trip", "log1p_red_steps", "log1p_grid",
    "log1p_block",     "sm_efficiency",   "log1p_active_sms",
    "arith_intensity"};

FeatureVector features_from_counters(const OperatorSpec& op, const Schedule& s,
                                     const CounterSet& c) {
    const LoopNest nest = op.nest();
    auto lg = [](std::int64_t v) { return std::log1p(static_cast<double>(v)); };

    // loop levels of the tiled nest: 3 grid + 3 thread + reduction step +
    // inner reduction + per-thread spatial levels with extent > 1
    std::int64_t levels = 8;
    for (const DimTiling& t : s.spatial) {
        if (t.per_thread > 1) ++levels;
    }

    FeatureVector f{};
    f[0] = lg(c.flops);
    f[1] = lg(c.int_ops);
    f[2] = lg(c.glb_ld);
    f[3] = lg(c.glb_st);
    f[4] = lg(c.shared_ld);
    f[5] = lg(c.shared_st);
    f[6] = static_cast<double>(s.vectorize);
    f[7] = static_cast<double>(s.unroll);
    f[8] = lg(levels);
    f[9] = lg(s.spatial[2].per_thread); // innermost spatial trip count
    f[10] = lg(s.reduction_steps(nest.k));
    f[11] = lg(c.grid);
    f[12] = lg(c.block);
    f[13] = c.sm_efficiency;
    f[14] = lg(c.active_sms);
    f[15] = static_cast<double>(c.flops) /
            static_cast<double>(c.glb_ld + c.glb_st + 1);
    return f;
}

FeatureVector extract_features(const OperatorSpec& op, const Schedule& s,
                               const DeviceConfig& dev) {
    return features_from_counters(op, s, derive_counters(op, s, dev));
}

} // namespace etune
