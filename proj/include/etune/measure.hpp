#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "etune/counters.hpp"
#include "etune/device.hpp"
#include "etune/space.hpp"

namespace etune {

// One completed energy measurement. energy_mj is stored redundantly and must
// equal avg_power_w * latency_ms (W x ms = mJ); loads re-check the identity.
struct MeasurementRecord {
    std::uint64_t candidate_id = 0;
    double latency_ms = 0.0;
    double avg_power_w = 0.0;
    double energy_mj = 0.0;
    std::int64_t iterations = 0;
    std::string backend;
    std::string timestamp;
};

std::string current_timestamp_utc();

// Roofline latency and decomposed power for a counter set:
//   latency = max(flops / (active_sms * throughput * sm_efficiency),
//                 (glb_ld + glb_st) / bandwidth,
//                 latency floor)
//   power   = constant + static_per_sm * active_sms + dynamic_energy / latency
struct PowerLatency {
    double power_w = 0.0;
    double latency_ms = 0.0;
    double dynamic_energy_mj = 0.0;
};

PowerLatency sim_true_power_and_latency(const CounterSet& counters,
                                        const DeviceConfig& dev);

// One simulated NVML power sample.
struct PowerSample {
    double t_s = 0.0;
    double watts = 0.0;
    bool in_warmup = false;
};

// Full sampler trace for a candidate: pre-heat phase (thermal multiplier
// ramping 0.95 -> 1.0 over warmup_s) followed by the measurement window of
// max(min_iterations, ceil(min_sample_window_s / latency)) kernel repeats.
// Pure function of (candidate, dev) including the configured seed.
std::vector<PowerSample> sim_power_trace(const Candidate& candidate,
                                         const DeviceConfig& dev);

// Averages the post-warmup samples of sim_power_trace into a record.
// With noise_sigma_rel = 0 the average equals the true operating power.
MeasurementRecord nvml_sim_measure(const Candidate& candidate,
                                   const DeviceConfig& dev);

// Append-only JSONL measurement log.
class MeasurementLog {
public:
    void add(const MeasurementRecord& record);
    const std::vector<MeasurementRecord>& records() const { return records_; }

    // Most recent record for the candidate; throws TraceMiss when absent.
    const MeasurementRecord& lookup(std::uint64_t candidate_id) const;
    bool contains(std::uint64_t candidate_id) const;

private:
    std::vector<MeasurementRecord> records_;
    std::map<std::uint64_t, std::size_t> by_id_;
};

// Appends one record as a JSONL line. Throws IoError.
void log_append(const std::string& path, const MeasurementRecord& record);

// Loads a JSONL log, validating the energy identity per line; violations
// raise ConsistencyError naming the line number. A missing file is an
// IoError; an empty file is an empty log.
MeasurementLog log_load(const std::string& path);

// Serial measurement source. Implementations must be deterministic given
// their configured seed. Callers serialize access (one measurement at a
// time, as on a real exclusive GPU).
class MeasurementBackend {
public:
    virtual ~MeasurementBackend() = default;

    virtual std::string name() const = 0;

    // Cheap timing-only evaluation used by the latency filter.
    virtual double measure_latency_ms(const Candidate& candidate) = 0;

    // Full energy measurement.
    virtual MeasurementRecord measure(const Candidate& candidate) = 0;
};

// Simulated GPU driven by a DeviceConfig.
class SimBackend : public MeasurementBackend {
public:
    explicit SimBackend(DeviceConfig dev);

    std::string name() const override { return "sim"; }
    double measure_latency_ms(const Candidate& candidate) override;
    MeasurementRecord measure(const Candidate& candidate) override;

    const DeviceConfig& device() const { return dev_; }

private:
    DeviceConfig dev_;
};

// Replays records from a measurement log; throws TraceMiss on unknown
// candidates.
class ReplayBackend : public MeasurementBackend {
public:
    explicit ReplayBackend(MeasurementLog log);

    std::string name() const override { return "replay"; }
    double measure_latency_ms(const Candidate& candidate) override;
    MeasurementRecord measure(const Candidate& candidate) override;

private:
    MeasurementLog log_;
};

// Interface stub for on-hardware NVML measurement. Every call throws
// BackendUnavailable: this build is simulation-only. A real implementation
// would pre-heat the GPU for warmup_s, launch the kernel for at least
// min_iterations repeats or min_sample_window_s of samples, poll NVML power
// at its supported rate and average the samples over the run.
class NvmlBackend : public MeasurementBackend {
public:
    std::string name() const override { return "nvml"; }
    double measure_latency_ms(const Candidate& candidate) override;
    MeasurementRecord measure(const Candidate& candidate) override;
};

std::unique_ptr<MeasurementBackend> make_backend(const std::string& name,
                                                 const DeviceConfig& dev,
                                                 const std::string& trace_path = "");

} // namespace etune
