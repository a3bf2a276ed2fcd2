#pragma once

#include <cstdint>
#include <string>

namespace etune {

inline constexpr const char* kProfileVersion = "etune-profile-v1";

// Simulated GPU description. Power decomposes into a constant board draw,
// per-active-SM static power and activity-driven dynamic energy. Latency is
// roofline-style: max(compute time, memory time, launch floor).
//
// The shipped a100-like profile is fixed by a calibration sweep (see
// tools/calibrate) so that constant+static sits in the 40-50% band at
// typical load and the space carries an inverse latency/power correlation.
struct DeviceConfig {
    std::string name = "a100-like";
    int num_sms = 108;

    double constant_power_w = 60.0;
    double static_power_per_sm_w = 0.55;

    double dynamic_energy_per_flop_nj = 0.002;
    double dynamic_energy_per_glb_access_nj = 0.125;
    double dynamic_energy_per_shared_access_nj = 0.0125;

    double base_throughput_flops_per_s_per_sm = 1.8e11;
    double mem_bandwidth_elems_per_s = 3.3e11;
    double latency_floor_ms = 1e-5;

    // NVML-style sampler simulation
    double sampler_hz = 50.0;
    double warmup_s = 2.0;
    double noise_sigma_rel = 0.05;
    std::uint64_t rng_seed = 1234;

    // Block-size occupancy knee: blocks smaller than this fraction of 256
    // threads proportionally reduce sm_efficiency.
    static constexpr double kOccupancyBlockDivisor = 256.0;

    void validate() const;

    static DeviceConfig a100_like();
};

// Versioned JSON profile files. Throws IoError / VersionMismatch /
// ValidationError.
DeviceConfig load_device_profile(const std::string& path);
void save_device_profile(const DeviceConfig& dev, const std::string& path);

std::string device_profile_to_json(const DeviceConfig& dev);
DeviceConfig device_profile_from_json(const std::string& text);

} // namespace etune
