#include <cmath>
#include <cstdint>
#include <vector>

#include "etune/counters.hpp"
#include "etune/errors.hpp"

// interpret_counters: a transaction-level interpreter for the tiled loop
// nest. It stages operand tiles into an explicit shared-memory buffer,
// reads per-thread fragments out of it, accumulates outputs in registers
// and stores them once, counting every access at the point it happens.
// The produced output tensor is checked against a naive evaluation of the
// same lowered nest, so a mis-tiled traversal fails loudly instead of
// producing plausible counters.

namespace etune {

namespace {

constexpr std::int64_t kInterpreterSizeCap = 1 << 16;

// Small exact integer values keep the output comparison exact.
double a_value(std::int64_t b, std::int64_t m, std::int64_t k) {
    return static_cast<double>((b * 31 + m * 17 + k * 7) % 13 - 6);
}

double b_value_mm(std::int64_t b, std::int64_t k, std::int64_t n) {
    return static_cast<double>((b * 23 + k * 11 + n * 5) % 9 - 4);
}

double conv_input(std::int64_t b, std::int64_t h, std::int64_t w,
                  std::int64_t ci) {
    return static_cast<double>((b * 29 + h * 13 + w * 5 + ci * 3) % 11 - 5);
}

double conv_weight(std::int64_t ci, std::int64_t kh, std::int64_t kw,
                   std::int64_t co) {
    return static_cast<double>((ci * 7 + kh * 3 + kw * 11 + co * 2) % 9 - 4);
}

struct LoweredOperands {
    LoopNest nest;
    std::vector<double> a; // [batch][m][k]
    std::vector<double> b; // [batch][k][n]

    double at_a(std::int64_t bb, std::int64_t mm, std::int64_t kk) const {
        return a[(bb * nest.m + mm) * nest.k + kk];
    }
    double at_b(std::int64_t bb, std::int64_t kk, std::int64_t nn) const {
        return b[(bb * nest.k + kk) * nest.n + nn];
    }
};

// Materializes the lowered GEMM view of the operator: identity for MM/MV,
// im2col for Conv (padding reads as zero, weights are batch-invariant).
LoweredOperands materialize_operands(const OperatorSpec& op) {
    LoweredOperands ops;
    ops.nest = op.nest();
    ops.a.resize(static_cast<std::size_t>(ops.nest.batch * ops.nest.m * ops.nest.k));
    ops.b.resize(static_cast<std::size_t>(ops.nest.batch * ops.nest.k * ops.nest.n));

    if (op.kind == OpKind::CONV) {
        const std::int64_t out_w = op.conv_out_width();
        const std::int64_t ks = op.kernel_size;
        for (std::int64_t b = 0; b < ops.nest.batch; ++b) {
            for (std::int64_t m = 0; m < ops.nest.m; ++m) {
                const std::int64_t oh = m / out_w;
                const std::int64_t ow = m % out_w;
                for (std::int64_t k = 0; k < ops.nest.k; ++k) {
                    const std::int64_t ci = k / (ks * ks);
                    const std::int64_t kh = (k / ks) % ks;
                    const std::int64_t kw = k % ks;
                    const std::int64_t h = oh * op.stride - op.padding + kh;
                    const std::int64_t w = ow * op.stride - op.padding + kw;
                    double value = 0.0;
                    if (h >= 0 && h < op.height && w >= 0 && w < op.width) {
                        value = conv_input(b, h, w, ci);
                    }
                    ops.a[(b * ops.nest.m + m) * ops.nest.k + k] = value;
                }
            }
            for (std::int64_t k = 0; k < ops.nest.k; ++k) {
                const std::int64_t ci = k / (ks * ks);
                const std::int64_t kh = (k / ks) % ks;
                const std::int64_t kw = k % ks;
                for (std::int64_t n = 0; n < ops.nest.n; ++n) {
                    ops.b[(b * ops.nest.k + k) * ops.nest.n + n] =
                        conv_weight(ci, kh, kw, n);
                }
            }
        }
    } else {
        for (std::int64_t b = 0; b < ops.nest.batch; ++b) {
            for (std::int64_t m = 0; m < ops.nest.m; ++m) {
                for (std::int64_t k = 0; k < ops.nest.k; ++k) {
                    ops.a[(b * ops.nest.m + m) * ops.nest.k + k] = a_value(b, m, k);
                }
            }
            for (std::int64_t k = 0; k < ops.nest.k; ++k) {
                for (std::int64_t n = 0; n < ops.nest.n; ++n) {
                    ops.b[(b * ops.nest.k + k) * ops.nest.n + n] =
                        b_value_mm(b, k, n);
                }
            }
        }
    }
    return ops;
}

struct SharedTile {
    std::vector<double> data;
    std::vector<char> valid;

    void reset(std::size_t size) {
        data.assign(size, 0.0);
        valid.assign(size, 0);
    }
    void store(std::size_t idx, double v) {
        data[idx] = v;
        valid[idx] = 1;
    }
    double load(std::size_t idx) const {
        if (!valid[idx]) {
            throw ConsistencyError(
                "interpreter read a shared-memory slot before it was staged");
        }
        return data[idx];
    }
};

} // namespace

CounterSet interpret_counters(const OperatorSpec& op, const Schedule& s,
                              const DeviceConfig& dev) {
    validate_schedule(op, s);
    const LoopNest nest = op.nest();
    if (nest.extent_product() > kInterpreterSizeCap) {
        throw TooLarge("interpreter cap is extent product <= 2^16, got " +
                       std::to_string(nest.extent_product()));
    }

    const LoweredOperands operands = materialize_operands(op);

    const DimTiling& tb = s.spatial[0];
    const DimTiling& tm = s.spatial[1];
    const DimTiling& tn = s.spatial[2];
    const std::int64_t bt_b = tb.block_tile();
    const std::int64_t bt_m = tm.block_tile();
    const std::int64_t bt_n = tn.block_tile();
    const std::int64_t steps = s.reduction_steps(nest.k);

    CounterSet c;
    c.grid = s.grid_size();
    c.block = s.block_size();

    std::vector<double> output(
        static_cast<std::size_t>(nest.batch * nest.m * nest.n), 0.0);
    std::vector<char> output_written(output.size(), 0);

    SharedTile smem_a; // [bt_b][bt_m][k_tile]
    SharedTile smem_b; // [bt_b][k_tile][bt_n]
    std::vector<double> acc; // [bt_b][bt_m][bt_n], registers of the block
    std::vector<double> frag_a(
        static_cast<std::size_t>(tb.per_thread * tm.per_thread));
    std::vector<double> frag_b(
        static_cast<std::size_t>(tb.per_thread * tn.per_thread));

    for (std::int64_t blk_b = 0; blk_b < tb.blocks; ++blk_b) {
        for (std::int64_t blk_m = 0; blk_m < tm.blocks; ++blk_m) {
            for (std::int64_t blk_n = 0; blk_n < tn.blocks; ++blk_n) {
                acc.assign(static_cast<std::size_t>(bt_b * bt_m * bt_n), 0.0);

                for (std::int64_t step = 0; step < steps; ++step) {
                    const std::int64_t k0 = step * s.k_tile;

                    // cooperative staging: global -> shared, once per step
                    smem_a.reset(static_cast<std::size_t>(bt_b * bt_m * s.k_tile));
                    for (std::int64_t lb = 0; lb < bt_b; ++lb) {
                        for (std::int64_t lm = 0; lm < bt_m; ++lm) {
                            for (std::int64_t lk = 0; lk < s.k_tile; ++lk) {
                                const double v = operands.at_a(
                                    blk_b * bt_b + lb, blk_m * bt_m + lm, k0 + lk);
                                ++c.glb_ld;
                                smem_a.store(
                                    static_cast<std::size_t>((lb * bt_m + lm) * s.k_tile + lk),
                                    v);
                                ++c.shared_st;
                            }
                        }
                    }
                    smem_b.reset(static_cast<std::size_t>(bt_b * s.k_tile * bt_n));
                    for (std::int64_t lb = 0; lb < bt_b; ++lb) {
                        for (std::int64_t lk = 0; lk < s.k_tile; ++lk) {
                            for (std::int64_t ln = 0; ln < bt_n; ++ln) {
                                const double v = operands.at_b(
                                    blk_b * bt_b + lb, k0 + lk, blk_n * bt_n + ln);
                                ++c.glb_ld;
                                smem_b.store(
                                    static_cast<std::size_t>((lb * s.k_tile + lk) * bt_n + ln),
                                    v);
                                ++c.shared_st;
                            }
                        }
                    }

                    // every thread walks the staged reduction slice
                    for (std::int64_t th_b = 0; th_b < tb.threads; ++th_b) {
                        for (std::int64_t th_m = 0; th_m < tm.threads; ++th_m) {
                            for (std::int64_t th_n = 0; th_n < tn.threads; ++th_n) {
                                for (std::int64_t lk = 0; lk < s.k_tile; ++lk) {
                                    // fragment loads: shared -> registers
                                    for (std::int64_t eb = 0; eb < tb.per_thread; ++eb) {
                                        const std::int64_t lb = th_b * tb.per_thread + eb;
                                        for (std::int64_t em = 0; em < tm.per_thread; ++em) {
                                            const std::int64_t lm = th_m * tm.per_thread + em;
                                            frag_a[static_cast<std::size_t>(
                                                eb * tm.per_thread + em)] =
                                                smem_a.load(static_cast<std::size_t>(
                                                    (lb * bt_m + lm) * s.k_tile + lk));
                                            ++c.shared_ld;
                                            ++c.int_ops;
                                        }
                                        for (std::int64_t en = 0; en < tn.per_thread; ++en) {
                                            const std::int64_t ln = th_n * tn.per_thread + en;
                                            frag_b[static_cast<std::size_t>(
                                                eb * tn.per_thread + en)] =
                                                smem_b.load(static_cast<std::size_t>(
                                                    (lb * s.k_tile + lk) * bt_n + ln));
                                            ++c.shared_ld;
                                            ++c.int_ops;
                                        }
                                    }
                                    // multiply-accumulate into register tile
                                    for (std::int64_t eb = 0; eb < tb.per_thread; ++eb) {
                                        const std::int64_t lb = th_b * tb.per_thread + eb;
                                        for (std::int64_t em = 0; em < tm.per_thread; ++em) {
                                            const std::int64_t lm = th_m * tm.per_thread + em;
                                            for (std::int64_t en = 0; en < tn.per_thread; ++en) {
                                                const std::int64_t ln = th_n * tn.per_thread + en;
                                                acc[static_cast<std::size_t>(
                                                    (lb * bt_m + lm) * bt_n + ln)] +=
                                                    frag_a[static_cast<std::size_t>(
                                                        eb * tm.per_thread + em)] *
                                                    frag_b[static_cast<std::size_t>(
                                                        eb * tn.per_thread + en)];
                                                c.flops += 2;
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }

                // registers -> global, once per output element
                for (std::int64_t lb = 0; lb < bt_b; ++lb) {
                    const std::int64_t gb = blk_b * bt_b + lb;
                    for (std::int64_t lm = 0; lm < bt_m; ++lm) {
                        const std::int64_t gm = blk_m * bt_m + lm;
                        for (std::int64_t ln = 0; ln < bt_n; ++ln) {
                            const std::int64_t gn = blk_n * bt_n + ln;
                            const std::size_t idx = static_cast<std::size_t>(
                                (gb * nest.m + gm) * nest.n + gn);
                            if (output_written[idx]) {
                                throw ConsistencyError(
                                    "interpreter stored an output element twice");
                            }
                            output[idx] =
                                acc[static_cast<std::size_t>((lb * bt_m + lm) * bt_n + ln)];
                            output_written[idx] = 1;
                            ++c.glb_st;
                        }
                    }
                }
            }
        }
    }

    // self-check: the tiled traversal must compute the same tensor as the
    // naive nest (values are small integers, so equality is exact)
    for (std::int64_t b = 0; b < nest.batch; ++b) {
        for (std::int64_t m = 0; m < nest.m; ++m) {
            for (std::int64_t n = 0; n < nest.n; ++n) {
                double ref = 0.0;
                for (std::int64_t k = 0; k < nest.k; ++k) {
                    ref += operands.at_a(b, m, k) * operands.at_b(b, k, n);
                }
                const std::size_t idx =
                    static_cast<std::size_t>((b * nest.m + m) * nest.n + n);
                if (!output_written[idx] || output[idx] != ref) {
                    throw ConsistencyError(
                        "interpreter output disagrees with naive evaluation");
                }
            }
        }
    }

    c.active_sms = std::min<std::int64_t>(c.grid, dev.num_sms);
    c.sm_efficiency =
        (static_cast<double>(c.active_sms) / dev.num_sms) *
        std::min(1.0, static_cast<double>(c.block) /
                          DeviceConfig::kOccupancyBlockDivisor);
    return c;
}

} // namespace etune
