#pragma once

#include <cstdint>
#include <string>

namespace etune {

enum class OpKind { MM, MV, CONV };

const char* op_kind_name(OpKind kind);

// The loop nest a schedule is applied to: three spatial loops and one
// reduction loop. MM/MV map directly; Conv is lowered to its implicit-GEMM
// nest (spatial = batch x output-pixels x output-channels, reduction =
// input-channels x kernel-window).
struct LoopNest {
    std::int64_t batch = 1;
    std::int64_t m = 1;
    std::int64_t n = 1;
    std::int64_t k = 1;

    std::int64_t extent_product() const { return batch * m * n * k; }
};

// Workload description for one operator instance.
//
// MM/MV shapes are (batch, M, N, K); MV additionally requires M == 1.
// Conv shape is (batch, height, width, in_channels, out_channels,
// kernel_size, stride, padding) with square spatial window.
struct OperatorSpec {
    OpKind kind = OpKind::MM;

    // MM / MV
    std::int64_t batch = 1;
    std::int64_t m = 1;
    std::int64_t n = 1;
    std::int64_t k = 1;

    // CONV
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::int64_t in_channels = 0;
    std::int64_t out_channels = 0;
    std::int64_t kernel_size = 0;
    std::int64_t stride = 1;
    std::int64_t padding = 0;

    static OperatorSpec make_mm(std::int64_t batch, std::int64_t m,
                                std::int64_t n, std::int64_t k);
    static OperatorSpec make_mv(std::int64_t batch, std::int64_t n,
                                std::int64_t k);
    static OperatorSpec make_conv(std::int64_t batch, std::int64_t height,
                                  std::int64_t width, std::int64_t in_channels,
                                  std::int64_t out_channels,
                                  std::int64_t kernel_size, std::int64_t stride,
                                  std::int64_t padding);

    // Throws ValidationError when an invariant is violated.
    void validate() const;

    std::int64_t conv_out_height() const;
    std::int64_t conv_out_width() const;

    // Lowered loop-nest extents (identity for MM/MV, implicit GEMM for Conv).
    LoopNest nest() const;

    // Canonical CLI form, e.g. "mm:1,512,512,512".
    std::string to_string() const;

    bool operator==(const OperatorSpec& other) const;
};

// Parses "mm:1,512,512,512", "mv:1,1,4096,1024" or
// "conv:16,56,56,64,64,1,1,0". Throws ParseError / ValidationError.
OperatorSpec parse_operator(const std::string& text);

} // namespace etune
