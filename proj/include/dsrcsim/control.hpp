#pragma once

#include <optional>
#include <string_view>

namespace dsrcsim {

enum class ControlMode { Human, AccFallback, CaccPlatooned };

// Events that demand system fallback. Packet drops and infeasible control
// demands arise organically during simulation; domain exits and system
// failures are injectable through the scenario configuration.
enum class FallbackEvent { PacketDrop, InfeasibleSolution, OddExit, AdsFailure };

// Only platooned vehicles broadcast status messages.
constexpr bool is_broadcasting(ControlMode m) { return m == ControlMode::CaccPlatooned; }

std::string_view to_string(ControlMode m);
std::string_view to_string(FallbackEvent e);
std::optional<ControlMode> parse_control_mode(std::string_view s);
std::optional<FallbackEvent> parse_fallback_event(std::string_view s);

struct ControllerParams {
    double short_headway_s = 0.6;  // platooned time gap
    double long_headway_s = 1.5;   // fallback ACC time gap
    double standstill_gap_m = 2.0;
    double accel_max = 2.0;  // m/s^2
    double decel_max = 4.0;  // m/s^2, positive magnitude
    // String stability across a platoon needs 2*speed_gain*headway +
    // headway^2*gap_gain >= 2; softer textbook gains let approach speed
    // build up until the following vehicle cannot brake out of it.
    double gap_gain = 0.5;    // 1/s^2
    double speed_gain = 1.7;  // 1/s
    double cruise_gain = 0.4;  // 1/s, free-flow speed tracking
    int rejoin_threshold = 10;    // consecutive receptions to re-confirm
    double infeasible_factor = 1.5;

    void validate() const;
    double headway_for(ControlMode m) const {
        return m == ControlMode::CaccPlatooned ? short_headway_s : long_headway_s;
    }
    double desired_gap(double speed, double headway_s) const {
        return standstill_gap_m + headway_s * speed;
    }
};

// One transition of the fallback state machine. Packet drops and
// infeasible solutions revoke platoon status; a domain exit hands an
// automated vehicle back to the driver; a system failure hands any
// vehicle back to the driver. A fallen-back vehicle re-confirms its
// platoon after rejoin_threshold consecutive successful receptions.
// Human mode is never promoted here; entry into a platoon goes through
// the positional confirmation step of the traffic core.
ControlMode fallback_step(ControlMode mode, std::optional<FallbackEvent> event,
                          int consecutive_successes, const ControllerParams& params);

// Unsaturated constant-time-gap control demand.
double cacc_demand(double gap_m, double speed, double lead_speed, double headway_s,
                   const ControllerParams& params);

// Constant-time-gap law saturated to [-decel_max, accel_max]. Without a
// leader the vehicle tracks its desired speed.
double cacc_accel(std::optional<double> gap_m, double speed, double lead_speed,
                  double desired_speed, double headway_s, const ControllerParams& params);

// Proxy for an unsolvable control problem: the unsaturated short-headway
// demand calls for more than infeasible_factor times the available
// braking.
std::optional<FallbackEvent> infeasibility_check(double gap_m, double speed, double lead_speed,
                                                 const ControllerParams& params);

}  // namespace dsrcsim
