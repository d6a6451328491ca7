#include "dsrcsim/control.hpp"

#include <algorithm>

#include "dsrcsim/errors.hpp"

namespace dsrcsim {

std::string_view to_string(ControlMode m) {
    switch (m) {
        case ControlMode::Human: return "HUMAN";
        case ControlMode::AccFallback: return "ACC_FALLBACK";
        case ControlMode::CaccPlatooned: return "CACC_PLATOONED";
    }
    return "?";
}

std::string_view to_string(FallbackEvent e) {
    switch (e) {
        case FallbackEvent::PacketDrop: return "PACKET_DROP";
        case FallbackEvent::InfeasibleSolution: return "INFEASIBLE_SOLUTION";
        case FallbackEvent::OddExit: return "ODD_EXIT";
        case FallbackEvent::AdsFailure: return "ADS_FAILURE";
    }
    return "?";
}

std::optional<ControlMode> parse_control_mode(std::string_view s) {
    if (s == "HUMAN") return ControlMode::Human;
    if (s == "ACC_FALLBACK") return ControlMode::AccFallback;
    if (s == "CACC_PLATOONED") return ControlMode::CaccPlatooned;
    return std::nullopt;
}

std::optional<FallbackEvent> parse_fallback_event(std::string_view s) {
    if (s == "PACKET_DROP") return FallbackEvent::PacketDrop;
    if (s == "INFEASIBLE_SOLUTION") return FallbackEvent::InfeasibleSolution;
    if (s == "ODD_EXIT") return FallbackEvent::OddExit;
    if (s == "ADS_FAILURE") return FallbackEvent::AdsFailure;
    return std::nullopt;
}

void ControllerParams::validate() const {
    if (!(short_headway_s > 0.0) || !(long_headway_s > short_headway_s)) {
        throw ConfigError("controller: need 0 < short_headway_s < long_headway_s");
    }
    if (!(accel_max > 0.0) || !(decel_max > 0.0)) {
        throw ConfigError("controller: accel_max and decel_max must be positive");
    }
    if (rejoin_threshold < 1) throw ConfigError("controller: rejoin_threshold must be >= 1");
    if (!(standstill_gap_m >= 0.0)) throw ConfigError("controller: standstill_gap_m must be >= 0");
    if (!(infeasible_factor >= 1.0)) throw ConfigError("controller: infeasible_factor must be >= 1");
}

ControlMode fallback_step(ControlMode mode, std::optional<FallbackEvent> event,
                          int consecutive_successes, const ControllerParams& params) {
    if (consecutive_successes < 0) {
        throw std::invalid_argument("fallback_step: consecutive_successes must be >= 0");
    }
    if (event) {
        switch (*event) {
            case FallbackEvent::AdsFailure:
                return ControlMode::Human;
            case FallbackEvent::OddExit:
                return ControlMode::Human;  // no-op for a vehicle already under human control
            case FallbackEvent::PacketDrop:
            case FallbackEvent::InfeasibleSolution:
                if (mode == ControlMode::CaccPlatooned) return ControlMode::AccFallback;
                return mode;
        }
    }
    if (mode == ControlMode::AccFallback && consecutive_successes >= params.rejoin_threshold) {
        return ControlMode::CaccPlatooned;  // platoon confirmation
    }
    return mode;
}

double cacc_demand(double gap_m, double speed, double lead_speed, double headway_s,
                   const ControllerParams& params) {
    const double gap_error = gap_m - params.desired_gap(speed, headway_s);
    return params.gap_gain * gap_error + params.speed_gain * (lead_speed - speed);
}

double cacc_accel(std::optional<double> gap_m, double speed, double lead_speed,
                  double desired_speed, double headway_s, const ControllerParams& params) {
    double demand;
    if (gap_m) {
        if (*gap_m < 0.0) throw std::invalid_argument("cacc_accel: gap must be non-negative");
        demand = cacc_demand(*gap_m, speed, lead_speed, headway_s, params);
        // never chase a leader beyond the set speed
        if (speed >= desired_speed && demand > 0.0) {
            demand = std::min(demand, params.cruise_gain * (desired_speed - speed));
        }
    } else {
        demand = params.cruise_gain * (desired_speed - speed);
    }
    return std::clamp(demand, -params.decel_max, params.accel_max);
}

std::optional<FallbackEvent> infeasibility_check(double gap_m, double speed, double lead_speed,
                                                 const ControllerParams& params) {
    const double demand = cacc_demand(gap_m, speed, lead_speed, params.short_headway_s, params);
    if (demand < -params.infeasible_factor * params.decel_max) {
        return FallbackEvent::InfeasibleSolution;
    }
    return std::nullopt;
}

}  // namespace dsrcsim
