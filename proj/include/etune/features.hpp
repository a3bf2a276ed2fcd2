#pragma once

#include <array>
#include <string>

#include "etune/counters.hpp"

namespace etune {

// Bump whenever the feature layout below changes; serialized models refuse
// vectors from a different schema.
inline constexpr const char* kFeatureSchemaVersion = "etune-features-v1";

inline constexpr int kFeatureDim = 16;

// Fixed-length feature vector of a candidate kernel. Count-valued entries
// are log1p-scaled; sm_efficiency, vectorize, unroll and arithmetic
// intensity stay raw.
//
// Layout:
//   0  log1p(flops)             8  log1p(loop levels)
//   1  log1p(int_ops)           9  log1p(innermost trip count)
//   2  log1p(glb_ld)            10 log1p(reduction steps)
//   3  log1p(glb_st)            11 log1p(grid)
//   4  log1p(shared_ld)         12 log1p(block)
//   5  log1p(shared_st)         13 sm_efficiency
//   6  vectorize width          14 log1p(active_sms)
//   7  unroll depth             15 flops / (glb_ld + glb_st + 1)
using FeatureVector = std::array<double, kFeatureDim>;

extern const std::array<const char*, kFeatureDim> kFeatureNames;

// Deterministic, pure. Throws IllegalSchedule for schedules that do not fit
// the operator.
FeatureVector extract_features(const OperatorSpec& op, const Schedule& s,
                               const DeviceConfig& dev);

// Same extraction from an existing counter set (used when counters were
// already derived).
FeatureVector features_from_counters(const OperatorSpec& op, const Schedule& s,
                                     const CounterSet& c);

} // namespace etune
