#include "etune/schedule.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "etune/errors.hpp"

namespace etune {

namespace {

bool is_power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

const char* spatial_name(int i) {
    switch (i) {
    case 0: return "batch";
    case 1: return "m";
    case 2: return "n";
    }
    return "?";
}

} // namespace

void validate_schedule(const OperatorSpec& op, const Schedule& s) {
    const LoopNest nest = op.nest();
    const std::array<std::int64_t, 3> extents = {nest.batch, nest.m, nest.n};
    for (int i = 0; i < 3; ++i) {
        const DimTiling& t = s.spatial[i];
        if (t.blocks < 1 || t.threads < 1 || t.per_thread < 1) {
            throw IllegalSchedule(std::string("non-positive tile factor on ") +
                                  spatial_name(i));
        }
        if (t.extent() != extents[i]) {
            std::ostringstream msg;
            msg << "tiling of " << spatial_name(i) << " multiplies to "
                << t.extent() << ", expected " << extents[i];
            throw IllegalSchedule(msg.str());
        }
    }
    if (s.k_tile < 1 || nest.k % s.k_tile != 0) {
        throw IllegalSchedule("k_tile must divide the reduction extent");
    }
    const std::int64_t block = s.block_size();
    if (block < 1 || block > kMaxBlockThreads) {
        std::ostringstream msg;
        msg << "block size " << block << " outside [1, " << kMaxBlockThreads
            << "]";
        throw IllegalSchedule(msg.str());
    }
    if (!is_power_of_two(s.unroll) || s.k_tile % s.unroll != 0) {
        throw IllegalSchedule("unroll must be a power of two dividing k_tile");
    }
    if ((s.vectorize != 1 && s.vectorize != 2 && s.vectorize != 4) ||
        s.spatial[2].per_thread % s.vectorize != 0) {
        throw IllegalSchedule(
            "vectorize must be in {1,2,4} and divide the innermost "
            "per-thread extent");
    }
}

bool schedule_is_legal(const OperatorSpec& op, const Schedule& s) {
    try {
        validate_schedule(op, s);
        return true;
    } catch (const IllegalSchedule&) {
        return false;
    }
}

Schedule trivial_schedule(const OperatorSpec& op) {
    const LoopNest nest = op.nest();
    Schedule s;
    s.spatial[0] = {1, 1, nest.batch};
    s.spatial[1] = {1, 1, nest.m};
    s.spatial[2] = {1, 1, nest.n};
    s.k_tile = nest.k;
    s.unroll = 1;
    s.vectorize = 1;
    return s;
}

std::string schedule_to_json(const Schedule& s) {
    nlohmann::json j;
    j["spatial"] = nlohmann::json::array();
    for (const DimTiling& t : s.spatial) {
        j["spatial"].push_back({t.blocks, t.threads, t.per_thread});
    }
    j["k_tile"] = s.k_tile;
    j["unroll"] = s.unroll;
    j["vectorize"] = s.vectorize;
    return j.dump();
}

Schedule schedule_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad schedule JSON: ") + e.what());
    }
    Schedule s;
    try {
        const auto& spatial = j.at("spatial");
        if (!spatial.is_array() || spatial.size() != 3) {
            throw ParseError("schedule 'spatial' must be a 3-element array");
        }
        for (int i = 0; i < 3; ++i) {
            const auto& t = spatial.at(i);
            if (!t.is_array() || t.size() != 3) {
                throw ParseError(
                    "each spatial tiling must be [blocks,threads,per_thread]");
            }
            s.spatial[i].blocks = t.at(0).get<std::int64_t>();
            s.spatial[i].threads = t.at(1).get<std::int64_t>();
            s.spatial[i].per_thread = t.at(2).get<std::int64_t>();
        }
        s.k_tile = j.at("k_tile").get<std::int64_t>();
        s.unroll = j.value("unroll", std::int64_t{1});
        s.vectorize = j.value("vectorize", std::int64_t{1});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad schedule JSON: ") + e.what());
    }
    return s;
}

} // namespace etune
