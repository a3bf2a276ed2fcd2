#include "etune/opspec.hpp"

#include <charconv>
#include <sstream>
#include <vector>

#include "etune/errors.hpp"

namespace etune {

const char* op_kind_name(OpKind kind) {
    switch (kind) {
    case OpKind::MM: return "mm";
    case OpKind::MV: return "mv";
    case OpKind::CONV: return "conv";
    }
    return "?";
}

OperatorSpec OperatorSpec::make_mm(std::int64_t batch, std::int64_t m,
                                   std::int64_t n, std::int64_t k) {
    OperatorSpec op;
    op.kind = OpKind::MM;
    op.batch = batch;
    op.m = m;
    op.n = n;
    op.k = k;
    op.validate();
    return op;
}

OperatorSpec OperatorSpec::make_mv(std::int64_t batch, std::int64_t n,
                                   std::int64_t k) {
    OperatorSpec op;
    op.kind = OpKind::MV;
    op.batch = batch;
    op.m = 1;
    op.n = n;
    op.k = k;
    op.validate();
    return op;
}

OperatorSpec OperatorSpec::make_conv(std::int64_t batch, std::int64_t height,
                                     std::int64_t width,
                                     std::int64_t in_channels,
                                     std::int64_t out_channels,
                                     std::int64_t kernel_size,
                                     std::int64_t stride,
                                     std::int64_t padding) {
    OperatorSpec op;
    op.kind = OpKind::CONV;
    op.batch = batch;
    op.height = height;
    op.width = width;
    op.in_channels = in_channels;
    op.out_channels = out_channels;
    op.kernel_size = kernel_size;
    op.stride = stride;
    op.padding = padding;
    op.validate();
    return op;
}

void OperatorSpec::validate() const {
    if (kind == OpKind::MM || kind == OpKind::MV) {
        if (batch < 1 || m < 1 || n < 1 || k < 1) {
            throw ValidationError("matmul extents must all be >= 1");
        }
        if (kind == OpKind::MV && m != 1) {
            throw ValidationError("mv requires M == 1");
        }
        return;
    }
    if (batch < 1 || height < 1 || width < 1 || in_channels < 1 ||
        out_channels < 1 || kernel_size < 1) {
        throw ValidationError("conv extents must all be >= 1");
    }
    if (stride < 1) {
        throw ValidationError("conv stride must be >= 1");
    }
    if (padding < 0) {
        throw ValidationError("conv padding must be >= 0");
    }
    const std::int64_t h_span = height + 2 * padding - kernel_size;
    const std::int64_t w_span = width + 2 * padding - kernel_size;
    if (h_span < 0 || w_span < 0 || h_span % stride != 0 ||
        w_span % stride != 0) {
        throw ValidationError(
            "conv output extent (extent + 2*padding - kernel_size)/stride + 1 "
            "must be a positive integer");
    }
}

std::int64_t OperatorSpec::conv_out_height() const {
    return (height + 2 * padding - kernel_size) / stride + 1;
}

std::int64_t OperatorSpec::conv_out_width() const {
    return (width + 2 * padding - kernel_size) / stride + 1;
}

LoopNest OperatorSpec::nest() const {
    LoopNest nest;
    if (kind == OpKind::CONV) {
        nest.batch = batch;
        nest.m = conv_out_height() * conv_out_width();
        nest.n = out_channels;
        nest.k = in_channels * kernel_size * kernel_size;
    } else {
        nest.batch = batch;
        nest.m = m;
        nest.n = n;
        nest.k = k;
    }
    return nest;
}

std::string OperatorSpec::to_string() const {
    std::ostringstream out;
    out << op_kind_name(kind) << ':';
    if (kind == OpKind::CONV) {
        out << batch << ',' << height << ',' << width << ',' << in_channels
            << ',' << out_channels << ',' << kernel_size << ',' << stride
            << ',' << padding;
    } else {
        out << batch << ',' << m << ',' << n << ',' << k;
    }
    return out.str();
}

bool OperatorSpec::operator==(const OperatorSpec& other) const {
    if (kind != other.kind) return false;
    if (kind == OpKind::CONV) {
        return batch == other.batch && height == other.height &&
               width == other.width && in_channels == other.in_channels &&
               out_channels == other.out_channels &&
               kernel_size == other.kernel_size && stride == other.stride &&
               padding == other.padding;
    }
    return batch == other.batch && m == other.m && n == other.n &&
           k == other.k;
}

namespace {

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        std::int64_t value = 0;
        auto [ptr, ec] =
            std::from_chars(item.data(), item.data() + item.size(), value);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw ParseError("invalid integer '" + item + "' in operator shape");
        }
        values.push_back(value);
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return values;
}

} // namespace

OperatorSpec parse_operator(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) {
        throw ParseError("operator must look like 'mm:1,512,512,512', got '" +
                         text + "'");
    }
    const std::string head = text.substr(0, colon);
    const auto dims = parse_int_list(text.substr(colon + 1));
    if (head == "mm") {
        if (dims.size() != 4) {
            throw ParseError("mm expects 4 dims (batch,M,N,K)");
        }
        return OperatorSpec::make_mm(dims[0], dims[1], dims[2], dims[3]);
    }
    if (head == "mv") {
        if (dims.size() != 4) {
            throw ParseError("mv expects 4 dims (batch,1,N,K)");
        }
        if (dims[1] != 1) {
            throw ValidationError("mv requires M == 1");
        }
        return OperatorSpec::make_mv(dims[0], dims[2], dims[3]);
    }
    if (head == "conv") {
        if (dims.size() != 8) {
            throw ParseError(
                "conv expects 8 dims "
                "(batch,height,width,in_ch,out_ch,kernel,stride,pad)");
        }
        return OperatorSpec::make_conv(dims[0], dims[1], dims[2], dims[3],
                                       dims[4], dims[5], dims[6], dims[7]);
    }
    throw ParseError("unknown operator kind '" + head + "'");
}

} // namespace etune
