#include "dsrcsim/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dsrcsim/errors.hpp"

namespace dsrcsim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

struct Cursor {
    std::string origin;
    int line = 0;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
    }
};

double to_double(std::string_view v, const Cursor& at) {
    double out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        at.fail("expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

long long to_int(std::string_view v, const Cursor& at) {
    long long out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        at.fail("expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

InjectedEventSpec parse_inject(std::string_view value, const Cursor& at) {
    std::istringstream parts{std::string(value)};
    std::string time_str, selector_str, event_str, extra;
    if (!(parts >> time_str >> selector_str >> event_str)) {
        at.fail("inject needs '<time_s> <selector> <EVENT>'");
    }
    if (parts >> extra) at.fail("inject: trailing content '" + extra + "'");

    InjectedEventSpec spec;
    spec.time_s = to_double(time_str, at);
    const auto event = parse_fallback_event(event_str);
    if (!event) at.fail("unknown fallback event '" + event_str + "'");
    spec.event = *event;

    if (selector_str == "any_platooned") {
        spec.selector = InjectedEventSpec::Selector::AnyPlatooned;
    } else if (selector_str.starts_with("vehicle:")) {
        spec.selector = InjectedEventSpec::Selector::VehicleId;
        spec.value = static_cast<std::uint64_t>(to_int(selector_str.substr(8), at));
    } else if (selector_str.starts_with("cacc:")) {
        spec.selector = InjectedEventSpec::Selector::NthCacc;
        spec.value = static_cast<std::uint64_t>(to_int(selector_str.substr(5), at));
    } else {
        at.fail("unknown selector '" + selector_str +
                "' (use any_platooned, vehicle:<id> or cacc:<n>)");
    }
    return spec;
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::string& origin,
                              const std::string& base_dir) {
    ScenarioConfig cfg;
    std::string coefficients_file;
    std::string section;
    std::string raw;
    Cursor at{origin, 0};

    while (std::getline(in, raw)) {
        ++at.line;
        std::string_view line = raw;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string_view::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') at.fail("unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "scenario" && section != "network" && section != "demand" &&
                section != "dsrc" && section != "controller" && section != "idm" &&
                section != "lane_change" && section != "events") {
                at.fail("unknown section [" + section + "]");
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) at.fail("expected 'key = value'");
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) at.fail("expected 'key = value'");

        if (section == "scenario") {
            if (key == "policy") {
                const auto p = parse_lane_policy(std::string(value));
                if (!p) at.fail("unknown policy '" + std::string(value) + "'");
                cfg.network.policy = *p;
            } else if (key == "mpr") {
                cfg.demand.mpr = to_double(value, at);
            } else if (key == "horizon_s") {
                cfg.horizon_s = to_double(value, at);
            } else if (key == "warmup_s") {
                cfg.warmup_s = to_double(value, at);
            } else if (key == "dt_s") {
                cfg.dt_s = to_double(value, at);
            } else if (key == "control_every") {
                cfg.control_every = static_cast<int>(to_int(value, at));
            } else if (key == "replications") {
                cfg.replications = static_cast<int>(to_int(value, at));
            } else if (key == "base_seed") {
                cfg.base_seed = static_cast<std::uint64_t>(to_int(value, at));
            } else if (key == "vehicle_length_m") {
                cfg.vehicle_length_m = to_double(value, at);
            } else if (key == "platoon_link_factor") {
                cfg.platoon_link_factor = to_double(value, at);
            } else {
                at.fail("unknown key '" + key + "' in [scenario]");
            }
        } else if (section == "network") {
            if (key == "length_m") {
                cfg.network.length_m = to_double(value, at);
            } else if (key == "lanes") {
                cfg.network.lane_count = static_cast<int>(to_int(value, at));
            } else if (key == "access_zone") {
                std::istringstream pair{std::string(value)};
                std::string a, b, extra;
                if (!(pair >> a >> b) || (pair >> extra)) {
                    at.fail("access_zone needs '<start_m> <end_m>'");
                }
                cfg.network.access_zones.push_back({to_double(a, at), to_double(b, at)});
            } else {
                at.fail("unknown key '" + key + "' in [network]");
            }
        } else if (section == "demand") {
            if (key == "volume_vph") {
                cfg.demand.volume_vph = to_double(value, at);
            } else if (key == "hov_fraction") {
                cfg.demand.hov_fraction = to_double(value, at);
            } else if (key == "desired_speed_mean_mps") {
                cfg.demand.desired_speed_mean = to_double(value, at);
            } else if (key == "desired_speed_std_mps") {
                cfg.demand.desired_speed_std = to_double(value, at);
            } else {
                at.fail("unknown key '" + key + "' in [demand]");
            }
        } else if (section == "dsrc") {
            if (key == "range_m") {
                cfg.dsrc.range_m = to_double(value, at);
            } else if (key == "frequency_hz") {
                cfg.dsrc.frequency_hz = to_double(value, at);
            } else if (key == "coefficients_file") {
                coefficients_file = std::string(value);
            } else if (key == "reception_override") {
                cfg.reception_override = to_double(value, at);
            } else {
                at.fail("unknown key '" + key + "' in [dsrc]");
            }
        } else if (section == "controller") {
            if (key == "short_headway_s") {
                cfg.controller.short_headway_s = to_double(value, at);
            } else if (key == "long_headway_s") {
                cfg.controller.long_headway_s = to_double(value, at);
            } else if (key == "standstill_gap_m") {
                cfg.controller.standstill_gap_m = to_double(value, at);
            } else if (key == "accel_max_mps2") {
                cfg.controller.accel_max = to_double(value, at);
            } else if (key == "decel_max_mps2") {
                cfg.controller.decel_max = to_double(value, at);
            } else if (key == "gap_gain") {
                cfg.controller.gap_gain = to_double(value, at);
            } else if (key == "speed_gain") {
                cfg.controller.speed_gain = to_double(value, at);
            } else if (key == "cruise_gain") {
                cfg.controller.cruise_gain = to_double(value, at);
            } else if (key == "rejoin_threshold") {
                cfg.controller.rejoin_threshold = static_cast<int>(to_int(value, at));
            } else if (key == "infeasible_factor") {
                cfg.controller.infeasible_factor = to_double(value, at);
            } else {
                at.fail("unknown key '" + key + "' in [controller]");
            }
        } else if (section == "idm") {
            if (key == "time_headway_s") {
                cfg.idm.time_headway_s = to_double(value, at);
            } else if (key == "min_gap_m") {
                cfg.idm.min_gap_m = to_double(value, at);
            } else if (key == "accel_max_mps2") {
                cfg.idm.accel_max = to_double(value, at);
            } else if (key == "comfort_decel_mps2") {
                cfg.idm.comfort_decel = to_double(value, at);
            } else if (key == "emergency_decel_mps2") {
                cfg.idm.emergency_decel = to_double(value, at);
            } else {
                at.fail("unknown key '" + key + "' in [idm]");
            }
        } else if (section == "lane_change") {
            if (key == "politeness") {
                cfg.lane_change.politeness = to_double(value, at);
            } else if (key == "incentive_threshold_mps2") {
                cfg.lane_change.incentive_threshold = to_double(value, at);
            } else if (key == "safe_decel_mps2") {
                cfg.lane_change.safe_decel = to_double(value, at);
            } else if (key == "managed_bias_mps2") {
                cfg.lane_change.managed_bias = to_double(value, at);
            } else if (key == "min_gap_m") {
                cfg.lane_change.min_gap_m = to_double(value, at);
            } else if (key == "min_interval_s") {
                cfg.lane_change.min_interval_s = to_double(value, at);
            } else {
                at.fail("unknown key '" + key + "' in [lane_change]");
            }
        } else if (section == "events") {
            if (key == "inject") {
                cfg.injected_events.push_back(parse_inject(value, at));
            } else {
                at.fail("unknown key '" + key + "' in [events]");
            }
        } else {
            at.fail("key outside any [section]");
        }
    }

    if (!coefficients_file.empty()) {
        std::filesystem::path p{coefficients_file};
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        cfg.table = CoefficientTable::from_file(p.string());
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_scenario(in, path, dir);
}

}  // namespace dsrcsim
