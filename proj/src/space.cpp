#include "etune/space.hpp"

#include <algorithm>
#include <unordered_set>

#include "etune/errors.hpp"

namespace etune {

namespace {

void fnv_absorb(std::uint64_t& h, std::uint64_t v) {
    constexpr std::uint64_t kPrime = 1099511628211ull;
    for (int byte = 0; byte < 8; ++byte) {
        h ^= (v >> (byte * 8)) & 0xffu;
        h *= kPrime;
    }
}

} // namespace

std::uint64_t candidate_id(const OperatorSpec& op, const Schedule& s) {
    std::uint64_t h = 14695981039346656037ull; // FNV offset basis
    fnv_absorb(h, static_cast<std::uint64_t>(op.kind));
    fnv_absorb(h, static_cast<std::uint64_t>(op.batch));
    fnv_absorb(h, static_cast<std::uint64_t>(op.m));
    fnv_absorb(h, static_cast<std::uint64_t>(op.n));
    fnv_absorb(h, static_cast<std::uint64_t>(op.k));
    fnv_absorb(h, static_cast<std::uint64_t>(op.height));
    fnv_absorb(h, static_cast<std::uint64_t>(op.width));
    fnv_absorb(h, static_cast<std::uint64_t>(op.in_channels));
    fnv_absorb(h, static_cast<std::uint64_t>(op.out_channels));
    fnv_absorb(h, static_cast<std::uint64_t>(op.kernel_size));
    fnv_absorb(h, static_cast<std::uint64_t>(op.stride));
    fnv_absorb(h, static_cast<std::uint64_t>(op.padding));
    for (const DimTiling& t : s.spatial) {
        fnv_absorb(h, static_cast<std::uint64_t>(t.blocks));
        fnv_absorb(h, static_cast<std::uint64_t>(t.threads));
        fnv_absorb(h, static_cast<std::uint64_t>(t.per_thread));
    }
    fnv_absorb(h, static_cast<std::uint64_t>(s.k_tile));
    fnv_absorb(h, static_cast<std::uint64_t>(s.unroll));
    fnv_absorb(h, static_cast<std::uint64_t>(s.vectorize));
    return h;
}

Candidate make_candidate(const OperatorSpec& op, const Schedule& s,
                         std::vector<std::uint64_t> lineage) {
    Candidate c;
    c.id = candidate_id(op, s);
    c.op = op;
    c.schedule = s;
    c.lineage = std::move(lineage);
    return c;
}

std::vector<std::int64_t> divisors(std::int64_t extent) {
    std::vector<std::int64_t> out;
    for (std::int64_t d = 1; d * d <= extent; ++d) {
        if (extent % d == 0) {
            out.push_back(d);
            if (d != extent / d) out.push_back(extent / d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<DimTiling> enumerate_dim_tilings(std::int64_t extent) {
    std::vector<DimTiling> out;
    for (std::int64_t blocks : divisors(extent)) {
        const std::int64_t rest = extent / blocks;
        for (std::int64_t threads : divisors(rest)) {
            out.push_back({blocks, threads, rest / threads});
        }
    }
    return out;
}

namespace {

std::vector<std::int64_t> powers_of_two_up_to(std::int64_t cap) {
    std::vector<std::int64_t> out;
    for (std::int64_t v = 1; v <= cap; v *= 2) out.push_back(v);
    if (out.empty()) out.push_back(1);
    return out;
}

} // namespace

ScheduleEnumerator::ScheduleEnumerator(const OperatorSpec& op,
                                       const SpaceLimits& limits)
    : op_(op), limits_(limits) {
    op_.validate();
    const LoopNest nest = op_.nest();
    tilings_[0] = enumerate_dim_tilings(nest.batch);
    tilings_[1] = enumerate_dim_tilings(nest.m);
    tilings_[2] = enumerate_dim_tilings(nest.n);
    k_tiles_ = divisors(nest.k);
    unrolls_ = powers_of_two_up_to(std::max<std::int64_t>(1, limits.max_unroll));
    vectors_ = powers_of_two_up_to(
        std::min<std::int64_t>(4, std::max<std::int64_t>(1, limits.max_vectorize)));
}

Schedule ScheduleEnumerator::current() const {
    Schedule s;
    s.spatial[0] = tilings_[0][index_[0]];
    s.spatial[1] = tilings_[1][index_[1]];
    s.spatial[2] = tilings_[2][index_[2]];
    s.k_tile = k_tiles_[index_[3]];
    s.unroll = unrolls_[index_[4]];
    s.vectorize = vectors_[index_[5]];
    return s;
}

bool ScheduleEnumerator::current_is_legal() const {
    const Schedule s = current();
    if (s.block_size() > std::min<std::int64_t>(limits_.max_block_threads,
                                                kMaxBlockThreads)) {
        return false;
    }
    if (s.k_tile % s.unroll != 0) return false;
    if (s.spatial[2].per_thread % s.vectorize != 0) return false;
    return true;
}

bool ScheduleEnumerator::advance() {
    const std::array<std::size_t, 6> sizes = {
        tilings_[0].size(), tilings_[1].size(), tilings_[2].size(),
        k_tiles_.size(),    unrolls_.size(),    vectors_.size()};
    // odometer with the last position fastest
    for (int pos = 5; pos >= 0; --pos) {
        if (++index_[pos] < sizes[pos]) return true;
        index_[pos] = 0;
    }
    return false;
}

std::optional<Schedule> ScheduleEnumerator::next() {
    if (done_) return std::nullopt;
    if (fresh_) {
        fresh_ = false;
        if (current_is_legal()) return current();
    }
    while (advance()) {
        if (current_is_legal()) return current();
    }
    done_ = true;
    return std::nullopt;
}

std::int64_t count_schedules(const OperatorSpec& op, const SpaceLimits& limits,
                             std::int64_t cap) {
    ScheduleEnumerator en(op, limits);
    std::int64_t count = 0;
    while (en.next()) {
        if (++count == cap) break;
    }
    return count;
}

std::vector<Schedule> enumerate_all_schedules(const OperatorSpec& op,
                                              const SpaceLimits& limits) {
    ScheduleEnumerator en(op, limits);
    std::vector<Schedule> out;
    while (auto s = en.next()) out.push_back(*s);
    return out;
}

std::vector<Candidate> sample_random(const OperatorSpec& op, std::int64_t n,
                                     std::uint64_t rng_seed,
                                     const SpaceLimits& limits) {
    if (n < 1) throw ValidationError("sample_random requires n >= 1");
    op.validate();

    std::mt19937_64 rng(rng_seed);
    const std::int64_t materialize_cap = std::max<std::int64_t>(2 * n, 4096);
    const std::int64_t counted = count_schedules(op, limits, materialize_cap + 1);
    if (counted < n) {
        throw SpaceExhausted("requested " + std::to_string(n) +
                             " candidates but only " + std::to_string(counted) +
                             " legal schedules exist");
    }

    std::vector<Candidate> out;
    out.reserve(static_cast<std::size_t>(n));

    if (counted <= materialize_cap) {
        // Small space: draw a random subset of the full enumeration.
        std::vector<Schedule> all = enumerate_all_schedules(op, limits);
        for (std::int64_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
            std::swap(all[i], all[pick(rng)]);
            out.push_back(make_candidate(op, all[i]));
        }
        return out;
    }

    // Large space: draw knobs independently and reject duplicates.
    const LoopNest nest = op.nest();
    const std::array<std::vector<DimTiling>, 3> tilings = {
        enumerate_dim_tilings(nest.batch), enumerate_dim_tilings(nest.m),
        enumerate_dim_tilings(nest.n)};
    const std::vector<std::int64_t> k_tiles = divisors(nest.k);
    const std::int64_t block_cap =
        std::min<std::int64_t>(limits.max_block_threads, kMaxBlockThreads);

    std::unordered_set<std::uint64_t> seen;
    std::int64_t attempts = 0;
    const std::int64_t max_attempts = 10000 + n * 1000;
    while (static_cast<std::int64_t>(out.size()) < n) {
        if (++attempts > max_attempts) {
            throw SpaceExhausted(
                "random sampling failed to find enough distinct candidates");
        }
        Schedule s;
        for (int i = 0; i < 3; ++i) {
            std::uniform_int_distribution<std::size_t> pick(0, tilings[i].size() - 1);
            s.spatial[i] = tilings[i][pick(rng)];
        }
        {
            std::uniform_int_distribution<std::size_t> pick(0, k_tiles.size() - 1);
            s.k_tile = k_tiles[pick(rng)];
        }
        {
            std::vector<std::int64_t> legal;
            for (std::int64_t u = 1; u <= limits.max_unroll && s.k_tile % u == 0;
                 u *= 2) {
                legal.push_back(u);
            }
            std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
            s.unroll = legal[pick(rng)];
        }
        {
            std::vector<std::int64_t> legal;
            for (std::int64_t v = 1;
                 v <= std::min<std::int64_t>(4, limits.max_vectorize) &&
                 s.spatial[2].per_thread % v == 0;
                 v *= 2) {
                legal.push_back(v);
            }
            std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
            s.vectorize = legal[pick(rng)];
        }
        if (s.block_size() > block_cap) continue;
        const std::uint64_t id = candidate_id(op, s);
        if (!seen.insert(id).second) continue;
        out.push_back(make_candidate(op, s));
    }
    return out;
}

} // namespace etune
