#include "etune/device.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "etune/errors.hpp"

namespace etune {

void DeviceConfig::validate() const {
    auto require_positive = [](double v, const char* field) {
        if (!(v > 0.0)) {
            throw ValidationError(std::string("device profile field '") + field +
                                  "' must be positive");
        }
    };
    if (num_sms < 1) throw ValidationError("num_sms must be >= 1");
    require_positive(constant_power_w, "constant_power_w");
    require_positive(static_power_per_sm_w, "static_power_per_sm_w");
    require_positive(dynamic_energy_per_flop_nj, "dynamic_energy_per_flop_nj");
    require_positive(dynamic_energy_per_glb_access_nj,
                     "dynamic_energy_per_glb_access_nj");
    require_positive(dynamic_energy_per_shared_access_nj,
                     "dynamic_energy_per_shared_access_nj");
    require_positive(base_throughput_flops_per_s_per_sm,
                     "base_throughput_flops_per_s_per_sm");
    require_positive(mem_bandwidth_elems_per_s, "mem_bandwidth_elems_per_s");
    require_positive(latency_floor_ms, "latency_floor_ms");
    if (sampler_hz < 30.0 || sampler_hz > 50.0) {
        throw ValidationError("sampler_hz must lie in [30, 50]");
    }
    if (warmup_s < 0.0) throw ValidationError("warmup_s must be >= 0");
    if (noise_sigma_rel < 0.0) {
        throw ValidationError("noise_sigma_rel must be >= 0");
    }
}

DeviceConfig DeviceConfig::a100_like() { return DeviceConfig{}; }

std::string device_profile_to_json(const DeviceConfig& dev) {
    nlohmann::json j;
    j["profile_version"] = kProfileVersion;
    j["name"] = dev.name;
    j["num_sms"] = dev.num_sms;
    j["constant_power_w"] = dev.constant_power_w;
    j["static_power_per_sm_w"] = dev.static_power_per_sm_w;
    j["dynamic_energy_per_flop_nj"] = dev.dynamic_energy_per_flop_nj;
    j["dynamic_energy_per_glb_access_nj"] = dev.dynamic_energy_per_glb_access_nj;
    j["dynamic_energy_per_shared_access_nj"] =
        dev.dynamic_energy_per_shared_access_nj;
    j["base_throughput_flops_per_s_per_sm"] =
        dev.base_throughput_flops_per_s_per_sm;
    j["mem_bandwidth_elems_per_s"] = dev.mem_bandwidth_elems_per_s;
    j["latency_floor_ms"] = dev.latency_floor_ms;
    j["sampler_hz"] = dev.sampler_hz;
    j["warmup_s"] = dev.warmup_s;
    j["noise_sigma_rel"] = dev.noise_sigma_rel;
    j["rng_seed"] = dev.rng_seed;
    return j.dump(2) + "\n";
}

DeviceConfig device_profile_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad device profile JSON: ") + e.what());
    }
    const std::string version = j.value("profile_version", "");
    if (version != kProfileVersion) {
        throw VersionMismatch("device profile version '" + version +
                              "' is not supported (expected " +
                              std::string(kProfileVersion) + ")");
    }
    DeviceConfig dev;
    try {
        dev.name = j.value("name", dev.name);
        dev.num_sms = j.at("num_sms").get<int>();
        dev.constant_power_w = j.at("constant_power_w").get<double>();
        dev.static_power_per_sm_w = j.at("static_power_per_sm_w").get<double>();
        dev.dynamic_energy_per_flop_nj =
            j.at("dynamic_energy_per_flop_nj").get<double>();
        dev.dynamic_energy_per_glb_access_nj =
            j.at("dynamic_energy_per_glb_access_nj").get<double>();
        dev.dynamic_energy_per_shared_access_nj =
            j.at("dynamic_energy_per_shared_access_nj").get<double>();
        dev.base_throughput_flops_per_s_per_sm =
            j.at("base_throughput_flops_per_s_per_sm").get<double>();
        dev.mem_bandwidth_elems_per_s =
            j.at("mem_bandwidth_elems_per_s").get<double>();
        dev.latency_floor_ms = j.at("latency_floor_ms").get<double>();
        dev.sampler_hz = j.at("sampler_hz").get<double>();
        dev.warmup_s = j.at("warmup_s").get<double>();
        dev.noise_sigma_rel = j.at("noise_sigma_rel").get<double>();
        dev.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad device profile JSON: ") + e.what());
    }
    dev.validate();
    return dev;
}

DeviceConfig load_device_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open device profile '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return device_profile_from_json(buf.str());
}

void save_device_profile(const DeviceConfig& dev, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write device profile '" + path + "'");
    out << device_profile_to_json(dev);
    if (!out) throw IoError("failed writing device profile '" + path + "'");
}

} // namespace etune
