#include "etune/genetic.hpp"

#include <algorithm>

#include "etune/errors.hpp"

namespace etune {

namespace {

std::vector<std::int64_t> legal_unrolls(std::int64_t k_tile,
                                        const SpaceLimits& limits) {
    std::vector<std::int64_t> out;
    for (std::int64_t u = 1; u <= std::max<std::int64_t>(1, limits.max_unroll);
         u *= 2) {
        if (k_tile % u == 0) out.push_back(u);
    }
    return out;
}

std::vector<std::int64_t> legal_vectors(std::int64_t per_thread_n,
                                        const SpaceLimits& limits) {
    std::vector<std::int64_t> out;
    const std::int64_t cap = std::min<std::int64_t>(4, limits.max_vectorize);
    for (std::int64_t v = 1; v <= std::max<std::int64_t>(1, cap); v *= 2) {
        if (per_thread_n % v == 0) out.push_back(v);
    }
    return out;
}

// Uniform pick, avoiding `avoid` when any alternative exists.
template <typename T>
T pick_different(const std::vector<T>& options, const T& avoid,
                 std::mt19937_64& rng) {
    if (options.size() <= 1) return options.empty() ? avoid : options.front();
    std::vector<T> alternatives;
    alternatives.reserve(options.size());
    for (const T& o : options) {
        if (!(o == avoid)) alternatives.push_back(o);
    }
    if (alternatives.empty()) return avoid;
    std::uniform_int_distribution<std::size_t> pick(0, alternatives.size() - 1);
    return alternatives[pick(rng)];
}

} // namespace

Schedule crossover_with_mask(const Schedule& a, const Schedule& b,
                             std::bitset<kNumKnobs> take_from_b) {
    Schedule s = a;
    if (take_from_b[static_cast<int>(Knob::BatchTiling)]) s.spatial[0] = b.spatial[0];
    if (take_from_b[static_cast<int>(Knob::MTiling)]) s.spatial[1] = b.spatial[1];
    if (take_from_b[static_cast<int>(Knob::NTiling)]) s.spatial[2] = b.spatial[2];
    if (take_from_b[static_cast<int>(Knob::Reduction)]) s.k_tile = b.k_tile;
    if (take_from_b[static_cast<int>(Knob::Unroll)]) s.unroll = b.unroll;
    if (take_from_b[static_cast<int>(Knob::Vectorize)]) s.vectorize = b.vectorize;
    return s;
}

Schedule mutate_knob(const OperatorSpec& op, const Schedule& s, Knob knob,
                     const SpaceLimits& limits, std::mt19937_64& rng) {
    const LoopNest nest = op.nest();
    Schedule out = s;
    switch (knob) {
    case Knob::BatchTiling:
    case Knob::MTiling:
    case Knob::NTiling: {
        const int dim = static_cast<int>(knob);
        const std::array<std::int64_t, 3> extents = {nest.batch, nest.m, nest.n};
        out.spatial[dim] = pick_different(enumerate_dim_tilings(extents[dim]),
                                          s.spatial[dim], rng);
        break;
    }
    case Knob::Reduction:
        out.k_tile = pick_different(divisors(nest.k), s.k_tile, rng);
        break;
    case Knob::Unroll:
        out.unroll =
            pick_different(legal_unrolls(out.k_tile, limits), s.unroll, rng);
        break;
    case Knob::Vectorize:
        out.vectorize = pick_different(
            legal_vectors(out.spatial[2].per_thread, limits), s.vectorize, rng);
        break;
    }
    return out;
}

Schedule repair_schedule(const OperatorSpec& op, Schedule s,
                         const SpaceLimits& limits, std::mt19937_64& rng) {
    const std::int64_t block_cap =
        std::min<std::int64_t>(limits.max_block_threads, kMaxBlockThreads);
    const LoopNest nest = op.nest();
    const std::array<std::int64_t, 3> extents = {nest.batch, nest.m, nest.n};

    for (int attempt = 0; attempt < 64 && s.block_size() > block_cap; ++attempt) {
        // resample the dimension contributing the most threads
        int dim = 0;
        for (int i = 1; i < 3; ++i) {
            if (s.spatial[i].threads > s.spatial[dim].threads) dim = i;
        }
        const std::int64_t other =
            s.block_size() / s.spatial[dim].threads;
        std::vector<DimTiling> fitting;
        for (const DimTiling& t : enumerate_dim_tilings(extents[dim])) {
            if (t.threads * other <= block_cap) fitting.push_back(t);
        }
        if (fitting.empty()) {
            s.spatial[dim] = {extents[dim], 1, 1};
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, fitting.size() - 1);
            s.spatial[dim] = fitting[pick(rng)];
        }
    }
    if (s.k_tile < 1 || nest.k % s.k_tile != 0) {
        s.k_tile = pick_different(divisors(nest.k), std::int64_t{0}, rng);
    }
    {
        const auto unrolls = legal_unrolls(s.k_tile, limits);
        if (std::find(unrolls.begin(), unrolls.end(), s.unroll) == unrolls.end()) {
            std::uniform_int_distribution<std::size_t> pick(0, unrolls.size() - 1);
            s.unroll = unrolls[pick(rng)];
        }
    }
    {
        const auto vectors = legal_vectors(s.spatial[2].per_thread, limits);
        if (std::find(vectors.begin(), vectors.end(), s.vectorize) ==
            vectors.end()) {
            std::uniform_int_distribution<std::size_t> pick(0, vectors.size() - 1);
            s.vectorize = vectors[pick(rng)];
        }
    }
    validate_schedule(op, s);
    return s;
}

std::vector<Candidate> reproduce(const std::vector<Candidate>& parents,
                                 std::int64_t n, const GeneticRates& rates,
                                 std::uint64_t rng_seed,
                                 const SpaceLimits& limits) {
    if (parents.empty()) {
        throw ValidationError("reproduce requires at least one parent");
    }
    const OperatorSpec& op = parents.front().op;
    for (const Candidate& p : parents) {
        if (!(p.op == op)) {
            throw ValidationError("all parents must share one OperatorSpec");
        }
    }
    const double total = rates.mutation + rates.crossover + rates.copy;
    if (total <= 0.0) {
        throw ValidationError("genetic rates must not all be zero");
    }

    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<Candidate> out;
    out.reserve(static_cast<std::size_t>(n));

    for (std::int64_t i = 0; i < n; ++i) {
        const Candidate& base = parents[static_cast<std::size_t>(i) % parents.size()];
        const double u = coin(rng) * total;
        if (u < rates.mutation) {
            std::uniform_int_distribution<int> pick_knob(0, kNumKnobs - 1);
            Schedule s = mutate_knob(op, base.schedule,
                                     static_cast<Knob>(pick_knob(rng)), limits, rng);
            s = repair_schedule(op, s, limits, rng);
            out.push_back(make_candidate(op, s, {base.id}));
        } else if (u < rates.mutation + rates.crossover) {
            std::uniform_int_distribution<std::size_t> pick_parent(0, parents.size() - 1);
            const Candidate* partner = &parents[pick_parent(rng)];
            const bool has_other = std::any_of(
                parents.begin(), parents.end(),
                [&](const Candidate& p) { return p.id != base.id; });
            while (has_other && partner->id == base.id) {
                partner = &parents[pick_parent(rng)];
            }
            std::bitset<kNumKnobs> mask(rng() & ((1u << kNumKnobs) - 1));
            Schedule s = crossover_with_mask(base.schedule, partner->schedule, mask);
            s = repair_schedule(op, s, limits, rng);
            out.push_back(make_candidate(op, s, {base.id, partner->id}));
        } else {
            out.push_back(make_candidate(op, base.schedule, {base.id}));
        }
    }
    return out;
}

} // namespace etune
