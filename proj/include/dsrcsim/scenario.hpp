#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsrcsim/stats.hpp"
#include "dsrcsim/traffic.hpp"

namespace dsrcsim {

struct ScenarioConfig {
    RoadNetwork network;  // carries the lane policy
    DemandSpec demand;    // carries the MPR
    DsrcParams dsrc;
    ControllerParams controller;
    IdmParams idm;
    LaneChangeParams lane_change;
    CoefficientTable table = CoefficientTable::builtin();

    double horizon_s = 3900.0;
    double warmup_s = 300.0;
    double dt_s = 0.5;
    int control_every = 5;
    int replications = 5;
    std::uint64_t base_seed = 1;
    double vehicle_length_m = 4.5;
    double platoon_link_factor = 2.0;
    std::optional<double> reception_override;
    std::vector<InjectedEventSpec> injected_events;

    void validate() const;
    WorldConfig world_config() const;
};

struct ReplicationSinks {
    std::function<void(const ReceptionRecord&)> reception;
    std::function<void(const FallbackRecord&)> fallback;
    std::function<void(double time_s, const Vehicle&)> trajectory;
};

struct ReplicationResult {
    int replication = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string diagnostic;

    // post-warm-up, platooned trials only
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::vector<double> xi_samples;

    // post-warm-up demotions out of platooned mode
    std::uint64_t fallback_packet_drop = 0;
    std::uint64_t fallback_infeasible = 0;

    std::uint64_t spawned = 0;
    std::uint64_t retired = 0;
    std::uint64_t remaining = 0;  // on network at the end
    std::uint64_t retired_post_warmup = 0;
    double throughput_vph = 0.0;
    ReceptionDiagnostics reception_diag;

    // Absent when no trials ran (e.g. MPR 0), never reported as zero.
    std::optional<double> reception_rate() const {
        if (trials == 0) return std::nullopt;
        return static_cast<double>(successes) / static_cast<double>(trials);
    }
};

struct MetricsAggregate {
    int replications_used = 0;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::optional<double> reception_rate;  // pooled: successes / trials
    SampleStats xi;                        // pooled samples
    std::uint64_t fallback_packet_drop = 0;
    std::uint64_t fallback_infeasible = 0;
    double mean_throughput_vph = 0.0;
};

// Runs one seeded replication of the configured scenario. A failed
// replication (invariant breach) returns failed=true with the diagnostic
// rather than throwing.
ReplicationResult run_replication(const ScenarioConfig& config, int replication_index,
                                  const ReplicationSinks* sinks = nullptr);

// Pools successful replications; throws std::invalid_argument when given
// nothing usable.
MetricsAggregate aggregate(std::span<const ReplicationResult> results);

struct SweepCell {
    LanePolicy policy{};
    double mpr = 0.0;
    std::vector<ReplicationResult> results;
    MetricsAggregate metrics;
    bool usable = false;
    std::string error;
};

// Full strategy x MPR matrix, replications seeded base_seed + index.
// Cells run independently; one failed cell does not abort the others.
std::vector<SweepCell> sweep(const ScenarioConfig& base, std::span<const LanePolicy> policies,
                             std::span<const double> mprs, int jobs = 0);

// Fixed-schema summary export shared by the run and sweep commands.
void write_summary_csv(std::ostream& out, std::span<const SweepCell> cells);

}  // namespace dsrcsim
