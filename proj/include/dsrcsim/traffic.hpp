#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "dsrcsim/channel.hpp"
#include "dsrcsim/control.hpp"
#include "dsrcsim/rng.hpp"

namespace dsrcsim {

// Managed lane strategies. The leftmost lane is the managed one:
// BASE reserves it for HOV, UML opens every lane to everyone, MML shares
// it between CACC and HOV, DL dedicates it to CACC, DLA dedicates it to
// CACC and restricts entry/exit to designated access zones.
enum class LanePolicy { Base, Uml, Mml, Dl, Dla };

enum class VehicleClass { GpHuman, HovHuman, Cacc };

std::string_view to_string(LanePolicy p);
std::string_view to_string(VehicleClass c);
std::optional<LanePolicy> parse_lane_policy(std::string_view s);

struct AccessZone {
    double start_m = 0.0;
    double end_m = 0.0;
};

struct RoadNetwork {
    double length_m = 8000.0;
    int lane_count = 4;
    LanePolicy policy = LanePolicy::Base;
    std::vector<AccessZone> access_zones;  // used by DLA only

    void validate() const;
    int managed_lane() const { return lane_count - 1; }  // leftmost
    bool is_managed_lane(int lane) const {
        return policy != LanePolicy::Uml && lane == managed_lane();
    }
    bool lane_allows(int lane, VehicleClass c) const;
    bool in_access_zone(double position_m) const;
};

struct IdmParams {
    double time_headway_s = 1.1;
    double min_gap_m = 2.0;
    double accel_max = 1.5;       // m/s^2
    double comfort_decel = 2.0;   // m/s^2
    double emergency_decel = 8.0;  // m/s^2, clamp for gap collapse

    void validate() const;
};

// Intelligent-Driver-Model car following. Free-flow term only when no
// leader; a non-positive gap returns the emergency clamp (the collision
// itself is recorded by the simulation invariant check).
double human_accel(std::optional<double> gap_m, double speed, double lead_speed,
                   double desired_speed, const IdmParams& params);

struct DemandSpec {
    double volume_vph = 6000.0;
    double mpr = 0.0;           // CACC fraction of arrivals
    double hov_fraction = 0.1;  // HOV fraction of the non-CACC arrivals
    double desired_speed_mean = 33.33;  // m/s
    double desired_speed_std = 1.5;

    void validate() const;
};

struct LaneChangeParams {
    double politeness = 0.3;
    double incentive_threshold = 0.1;  // m/s^2
    double safe_decel = 3.0;           // braking imposed on self or new follower
    double managed_bias = 0.5;         // m/s^2 pull toward an eligible managed lane
    double min_gap_m = 2.0;            // hard physical gap for a move
    double min_interval_s = 4.0;       // per-vehicle cooldown
};

using VehicleId = std::uint32_t;

struct Vehicle {
    VehicleId id = 0;
    VehicleClass klass = VehicleClass::GpHuman;
    int lane = 0;
    double position_m = 0.0;  // front bumper
    double speed = 0.0;       // m/s
    double accel = 0.0;       // m/s^2, last commanded
    ControlMode mode = ControlMode::Human;
    double desired_speed = 0.0;
    double active_headway_s = 0.0;
    int consecutive_successes = 0;
    std::optional<VehicleId> platoon_predecessor;
    double last_lane_change_s = -1e9;
};

struct InjectedEventSpec {
    enum class Selector { VehicleId, NthCacc, AnyPlatooned };
    double time_s = 0.0;
    Selector selector = Selector::AnyPlatooned;
    std::uint64_t value = 0;  // vehicle id or CACC spawn ordinal
    FallbackEvent event = FallbackEvent::OddExit;
};

struct WorldConfig {
    RoadNetwork network;
    DemandSpec demand;
    DsrcParams dsrc;
    ControllerParams controller;
    IdmParams idm;
    LaneChangeParams lane_change;
    CoefficientTable table = CoefficientTable::builtin();
    double dt_s = 0.5;
    int control_every = 5;  // communication/mode decisions every N steps
    double vehicle_length_m = 4.5;
    double platoon_link_factor = 2.0;  // link when gap <= factor * desired gap
    // Constant reception probability override; 1.0 reproduces the
    // perfect-communication assumption common in earlier studies.
    std::optional<double> reception_override;

    void validate() const;
};

struct ReceptionRecord {
    double time_s = 0.0;
    VehicleId vehicle = 0;
    ControlMode mode = ControlMode::Human;  // mode when the trial ran
    double x_m = 0.0;
    double delta_veh_per_km = 0.0;
    double xi_events = 0.0;
    double probability = 0.0;
    int attempts_used = 0;
    bool success = false;
};

struct FallbackRecord {
    double time_s = 0.0;
    VehicleId vehicle = 0;
    ControlMode from = ControlMode::Human;
    ControlMode to = ControlMode::Human;
    std::string_view cause;  // event name, "platoon_confirmation" or "link_lost"
};

// Discrete-time freeway world. One instance per replication; stepping is
// strictly sequential and fully determined by (config, seed).
class World {
public:
    World(WorldConfig cfg, std::uint64_t seed);

    // Advances one dt. Communication and mode decisions run on steps where
    // step_index % control_every == 0; car following, integration, lane
    // changes, spawning and retirement run every step. Throws
    // InvariantError with a diagnostic if the world state breaks.
    void step();

    double now_s() const { return t_; }
    std::int64_t step_index() const { return step_; }
    const WorldConfig& config() const { return cfg_; }

    const std::vector<Vehicle>& vehicles() const { return vehicles_; }
    const Vehicle* find(VehicleId id) const;

    // Direct placement for programmatic setups; desired_speed <= 0 uses
    // the demand mean.
    VehicleId add_vehicle(VehicleClass klass, int lane, double position_m, double speed,
                          double desired_speed = 0.0, ControlMode mode = ControlMode::Human);

    void schedule(const InjectedEventSpec& event);

    std::uint64_t spawned_total() const { return spawned_; }
    std::uint64_t retired_total() const { return retired_; }
    std::size_t queue_size() const { return queue_.size(); }
    const ReceptionDiagnostics& reception_diagnostics() const { return diag_; }

    // Gap-acceptance decision for one vehicle; exposed for inspection.
    std::optional<int> decide_lane_change(std::size_t vehicle_index) const;

    std::function<void(const ReceptionRecord&)> on_reception;
    std::function<void(const FallbackRecord&)> on_fallback;

private:
    struct Pending {
        VehicleClass klass;
        double desired_speed;
    };

    void rebuild_lane_index();
    const Vehicle* leader_in_lane(int lane, double position_m) const;
    const Vehicle* follower_in_lane(int lane, double position_m) const;
    double bumper_gap(const Vehicle& follower, const Vehicle& leader) const;
    double accel_command(const Vehicle& v, const Vehicle* leader) const;

    void control_phase();
    void acceleration_phase();
    void integration_phase();
    void lane_change_phase();
    void retirement_phase();
    void spawn_phase();
    void check_invariants() const;

    void resolve_injected_events(std::vector<std::pair<VehicleId, FallbackEvent>>& out);

    WorldConfig cfg_;
    Rng rng_;
    double t_ = 0.0;
    std::int64_t step_ = 0;
    std::vector<Vehicle> vehicles_;               // ascending id
    std::vector<std::vector<std::size_t>> lanes_;  // per lane, ascending position
    std::deque<Pending> queue_;
    VehicleId next_id_ = 1;
    std::uint64_t spawned_ = 0;
    std::uint64_t retired_ = 0;
    std::vector<VehicleId> cacc_spawn_order_;
    std::vector<InjectedEventSpec> injected_;
    std::vector<bool> injected_fired_;
    ReceptionDiagnostics diag_;
    double max_desired_seen_ = 0.0;
};

}  // namespace dsrcsim
