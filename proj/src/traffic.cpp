#include "dsrcsim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsrcsim/errors.hpp"

namespace dsrcsim {

std::string_view to_string(LanePolicy p) {
    switch (p) {
        case LanePolicy::Base: return "BASE";
        case LanePolicy::Uml: return "UML";
        case LanePolicy::Mml: return "MML";
        case LanePolicy::Dl: return "DL";
        case LanePolicy::Dla: return "DLA";
    }
    return "?";
}

std::string_view to_string(VehicleClass c) {
    switch (c) {
        case VehicleClass::GpHuman: return "GP";
        case VehicleClass::HovHuman: return "HOV";
        case VehicleClass::Cacc: return "CACC";
    }
    return "?";
}

std::optional<LanePolicy> parse_lane_policy(std::string_view s) {
    if (s == "BASE") return LanePolicy::Base;
    if (s == "UML") return LanePolicy::Uml;
    if (s == "MML") return LanePolicy::Mml;
    if (s == "DL") return LanePolicy::Dl;
    if (s == "DLA") return LanePolicy::Dla;
    return std::nullopt;
}

void RoadNetwork::validate() const {
    if (!(length_m > 0.0)) throw ConfigError("network: length_m must be positive");
    if (lane_count < 1) throw ConfigError("network: need at least one lane");
    if (policy != LanePolicy::Dla && !access_zones.empty()) {
        throw ConfigError("network: access zones are only meaningful under DLA");
    }
    double prev_end = -1.0;
    for (const auto& z : access_zones) {
        if (!(z.start_m >= 0.0 && z.end_m > z.start_m && z.end_m <= length_m)) {
            throw ConfigError("network: access zone outside [0, length]");
        }
        if (z.start_m <= prev_end) throw ConfigError("network: access zones must not overlap");
        prev_end = z.end_m;
    }
}

bool RoadNetwork::lane_allows(int lane, VehicleClass c) const {
    if (lane < 0 || lane >= lane_count) return false;
    if (lane != managed_lane()) return true;  // general purpose
    switch (policy) {
        case LanePolicy::Base: return c == VehicleClass::HovHuman;
        case LanePolicy::Uml: return true;
        case LanePolicy::Mml: return c == VehicleClass::Cacc || c == VehicleClass::HovHuman;
        case LanePolicy::Dl:
        case LanePolicy::Dla: return c == VehicleClass::Cacc;
    }
    return false;
}

bool RoadNetwork::in_access_zone(double position_m) const {
    for (const auto& z : access_zones) {
        if (position_m >= z.start_m && position_m <= z.end_m) return true;
    }
    return false;
}

void IdmParams::validate() const {
    if (!(time_headway_s > 0.0) || !(min_gap_m > 0.0) || !(accel_max > 0.0) ||
        !(comfort_decel > 0.0) || !(emergency_decel >= comfort_decel)) {
        throw ConfigError("idm: parameters out of range");
    }
}

double human_accel(std::optional<double> gap_m, double speed, double lead_speed,
                   double desired_speed, const IdmParams& p) {
    if (!(desired_speed > 0.0)) throw std::invalid_argument("human_accel: desired_speed must be > 0");
    const double free_ratio = speed / desired_speed;
    const double free_term = 1.0 - free_ratio * free_ratio * free_ratio * free_ratio;
    if (!gap_m) {
        return std::clamp(p.accel_max * free_term, -p.emergency_decel, p.accel_max);
    }
    if (*gap_m <= 0.0) return -p.emergency_decel;
    double s_star = p.min_gap_m + speed * p.time_headway_s +
                    speed * (speed - lead_speed) /
                        (2.0 * std::sqrt(p.accel_max * p.comfort_decel));
    s_star = std::max(s_star, p.min_gap_m);
    const double ratio = s_star / *gap_m;
    const double a = p.accel_max * (free_term - ratio * ratio);
    return std::clamp(a, -p.emergency_decel, p.accel_max);
}

void DemandSpec::validate() const {
    if (volume_vph < 0.0) throw ConfigError("demand: volume_vph must be >= 0");
    if (mpr < 0.0 || mpr > 1.0) throw ConfigError("demand: mpr must be in [0,1]");
    if (hov_fraction < 0.0 || hov_fraction > 1.0) {
        throw ConfigError("demand: hov_fraction must be in [0,1]");
    }
    if (!(desired_speed_mean > 0.0) || desired_speed_std < 0.0) {
        throw ConfigError("demand: desired speed distribution out of range");
    }
}

void WorldConfig::validate() const {
    network.validate();
    demand.validate();
    dsrc.validate();
    controller.validate();
    idm.validate();
    if (!(dt_s > 0.0)) throw ConfigError("world: dt_s must be positive");
    if (control_every < 1) throw ConfigError("world: control_every must be >= 1");
    if (!(vehicle_length_m > 0.0)) throw ConfigError("world: vehicle_length_m must be positive");
    if (!(platoon_link_factor > 0.0)) throw ConfigError("world: platoon_link_factor must be > 0");
    if (reception_override && (*reception_override < 0.0 || *reception_override > 1.0)) {
        throw ConfigError("world: reception_override must be in [0,1]");
    }
}

World::World(WorldConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
    cfg_.validate();
    lanes_.resize(static_cast<std::size_t>(cfg_.network.lane_count));
}

const Vehicle* World::find(VehicleId id) const {
    const auto it = std::lower_bound(vehicles_.begin(), vehicles_.end(), id,
                                     [](const Vehicle& v, VehicleId key) { return v.id < key; });
    if (it != vehicles_.end() && it->id == id) return &*it;
    return nullptr;
}

VehicleId World::add_vehicle(VehicleClass klass, int lane, double position_m, double speed,
                             double desired_speed, ControlMode mode) {
    if (lane < 0 || lane >= cfg_.network.lane_count) {
        throw std::invalid_argument("add_vehicle: lane out of range");
    }
    Vehicle v;
    v.id = next_id_++;
    v.klass = klass;
    v.lane = lane;
    v.position_m = position_m;
    v.speed = speed;
    v.desired_speed = desired_speed > 0.0 ? desired_speed : cfg_.demand.desired_speed_mean;
    v.mode = klass == VehicleClass::Cacc ? mode : ControlMode::Human;
    v.active_headway_s = cfg_.controller.headway_for(v.mode);
    max_desired_seen_ = std::max(max_desired_seen_, v.desired_speed);
    vehicles_.push_back(v);
    ++spawned_;
    if (klass == VehicleClass::Cacc) cacc_spawn_order_.push_back(v.id);
    rebuild_lane_index();
    return v.id;
}

void World::schedule(const InjectedEventSpec& event) {
    injected_.push_back(event);
    injected_fired_.push_back(false);
}

void World::rebuild_lane_index() {
    for (auto& lane : lanes_) lane.clear();
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        lanes_[static_cast<std::size_t>(vehicles_[i].lane)].push_back(i);
    }
    for (auto& lane : lanes_) {
        std::sort(lane.begin(), lane.end(), [&](std::size_t a, std::size_t b) {
            if (vehicles_[a].position_m != vehicles_[b].position_m) {
                return vehicles_[a].position_m < vehicles_[b].position_m;
            }
            return vehicles_[a].id < vehicles_[b].id;
        });
    }
}

const Vehicle* World::leader_in_lane(int lane, double position_m) const {
    const auto& idx = lanes_[static_cast<std::size_t>(lane)];
    const Vehicle* best = nullptr;
    const auto it = std::upper_bound(idx.begin(), idx.end(), position_m,
                                     [&](double pos, std::size_t i) {
                                         return pos < vehicles_[i].position_m;
                                     });
    if (it != idx.end()) best = &vehicles_[*it];
    return best;
}

// Cross-lane query: a vehicle exactly abreast counts as the leader, so a
// lane change toward it fails the gap check instead of slipping between
// the two strict searches.
const Vehicle* World::leader_in_lane_inclusive(int lane, double position_m) const {
    const auto& idx = lanes_[static_cast<std::size_t>(lane)];
    const auto it = std::lower_bound(idx.begin(), idx.end(), position_m,
                                     [&](std::size_t i, double pos) {
                                         return vehicles_[i].position_m < pos;
                                     });
    if (it != idx.end()) return &vehicles_[*it];
    return nullptr;
}

const Vehicle* World::follower_in_lane(int lane, double position_m) const {
    const auto& idx = lanes_[static_cast<std::size_t>(lane)];
    const auto it = std::lower_bound(idx.begin(), idx.end(), position_m,
                                     [&](std::size_t i, double pos) {
                                         return vehicles_[i].position_m < pos;
                                     });
    if (it == idx.begin()) return nullptr;
    return &vehicles_[*(it - 1)];
}

double World::bumper_gap(const Vehicle& follower, const Vehicle& leader) const {
    return leader.position_m - cfg_.vehicle_length_m - follower.position_m;
}

void World::resolve_injected_events(std::vector<std::pair<VehicleId, FallbackEvent>>& out) {
    for (std::size_t e = 0; e < injected_.size(); ++e) {
        if (injected_fired_[e] || injected_[e].time_s > t_) continue;
        const auto& spec = injected_[e];
        const Vehicle* target = nullptr;
        switch (spec.selector) {
            case InjectedEventSpec::Selector::VehicleId:
                target = find(static_cast<VehicleId>(spec.value));
                if (!target && spec.value < next_id_) injected_fired_[e] = true;  // retired
                break;
            case InjectedEventSpec::Selector::NthCacc:
                if (spec.value < cacc_spawn_order_.size()) {
                    target = find(cacc_spawn_order_[spec.value]);
                    if (!target) injected_fired_[e] = true;  // spawned and already retired
                }
                break;
            case InjectedEventSpec::Selector::AnyPlatooned:
                for (const auto& v : vehicles_) {
                    if (v.mode == ControlMode::CaccPlatooned) {
                        target = &v;
                        break;
                    }
                }
                break;
        }
        if (target) {
            out.emplace_back(target->id, spec.event);
            injected_fired_[e] = true;
        }
    }
}

void World::control_phase() {
    // Roster of broadcasters as of the start of this control step.
    std::vector<double> broadcasting;
    for (const auto& v : vehicles_) {
        if (v.klass == VehicleClass::Cacc && is_broadcasting(v.mode)) {
            broadcasting.push_back(v.position_m);
        }
    }
    const BroadcastRoster roster(std::move(broadcasting));

    std::vector<std::pair<VehicleId, FallbackEvent>> injected_now;
    resolve_injected_events(injected_now);
    const auto injected_for = [&](VehicleId id) -> std::optional<FallbackEvent> {
        for (const auto& [vid, ev] : injected_now) {
            if (vid == id) return ev;
        }
        return std::nullopt;
    };

    const ControllerParams& ctl = cfg_.controller;
    for (auto& v : vehicles_) {
        if (v.klass != VehicleClass::Cacc) continue;

        const Vehicle* leader = leader_in_lane(v.lane, v.position_m);
        // The link window scales with the vehicle's own desired gap under
        // its current law: the IDM gap while the driver steers, the ACC
        // long-headway gap once engaged. A fallen-back follower resting at
        // its ACC gap must stay in range or it could never re-confirm.
        const double desired_now =
            v.mode == ControlMode::Human
                ? cfg_.idm.min_gap_m + cfg_.idm.time_headway_s * v.speed
                : ctl.desired_gap(v.speed, ctl.long_headway_s);
        const bool linked = leader && leader->klass == VehicleClass::Cacc &&
                            bumper_gap(v, *leader) <=
                                cfg_.platoon_link_factor * desired_now;

        const ControlMode before = v.mode;
        std::optional<FallbackEvent> event = injected_for(v.id);
        std::string_view cause;

        if (event) {
            cause = to_string(*event);
        } else if (v.mode != ControlMode::Human) {
            if (linked) {
                const double x = leader->position_m - v.position_m;
                ReceptionOutcome outcome;
                ChannelLoad load;
                if (cfg_.reception_override) {
                    const double p = *cfg_.reception_override;
                    load.delta_veh_per_km = local_broadcaster_density(
                        v.position_m, roster, cfg_.dsrc.range_m, is_broadcasting(v.mode));
                    load.xi_events = communication_density(load.delta_veh_per_km,
                                                           cfg_.dsrc.range_m,
                                                           cfg_.dsrc.frequency_hz);
                    outcome = run_reception_trial([p] { return p; }, rng_);
                } else {
                    outcome = reception_trial(v.position_m, x, roster, is_broadcasting(v.mode),
                                              cfg_.table, cfg_.dsrc, rng_, &diag_, &load);
                }
                v.consecutive_successes = outcome.success ? v.consecutive_successes + 1 : 0;
                if (on_reception) {
                    on_reception({t_, v.id, before, x, load.delta_veh_per_km, load.xi_events,
                                  outcome.probability_used, outcome.attempts_used,
                                  outcome.success});
                }
                if (v.mode == ControlMode::CaccPlatooned) {
                    if (!outcome.success) {
                        event = FallbackEvent::PacketDrop;
                        cause = to_string(*event);
                    } else {
                        event = infeasibility_check(bumper_gap(v, *leader), v.speed,
                                                    leader->speed, ctl);
                        if (event) cause = to_string(*event);
                    }
                }
            } else {
                v.consecutive_successes = 0;
                if (v.mode == ControlMode::CaccPlatooned) {
                    // predecessor gone or out of reach; platoon link dissolves
                    v.mode = ControlMode::AccFallback;
                    v.platoon_predecessor.reset();
                    if (on_fallback) {
                        on_fallback({t_, v.id, before, v.mode, "link_lost"});
                    }
                }
            }
        }

        const ControlMode from = v.mode;
        ControlMode next = fallback_step(v.mode, event, v.consecutive_successes, ctl);

        if (next != from && !event && from == ControlMode::AccFallback &&
            next == ControlMode::CaccPlatooned) {
            cause = "platoon_confirmation";
        }
        if (next != from || event) {
            if (on_fallback) on_fallback({t_, v.id, from, next, cause});
        }
        if (next != v.mode) {
            v.mode = next;
            if (v.mode != ControlMode::CaccPlatooned) v.consecutive_successes = 0;
        }

        // Positional platoon confirmation: a human-driven CACC vehicle that
        // finds itself directly behind another CACC vehicle within link
        // range has completed the recommended lane change and joins.
        if (v.mode == ControlMode::Human && !event && linked) {
            v.mode = ControlMode::CaccPlatooned;
            v.consecutive_successes = 0;
            if (on_fallback) {
                on_fallback({t_, v.id, ControlMode::Human, v.mode, "platoon_confirmation"});
            }
        }

        v.platoon_predecessor =
            (v.mode == ControlMode::CaccPlatooned && linked)
                ? std::optional<VehicleId>(leader->id)
                : std::nullopt;
        v.active_headway_s = ctl.headway_for(v.mode);
    }
}

double World::accel_command(const Vehicle& v, const Vehicle* leader) const {
    std::optional<double> gap;
    double lead_speed = 0.0;
    if (leader) {
        gap = bumper_gap(v, *leader);
        lead_speed = leader->speed;
    }
    if (v.klass == VehicleClass::Cacc && v.mode != ControlMode::Human) {
        return cacc_accel(gap, v.speed, lead_speed, v.desired_speed, v.active_headway_s,
                          cfg_.controller);
    }
    return human_accel(gap, v.speed, lead_speed, v.desired_speed, cfg_.idm);
}

void World::acceleration_phase() {
    for (auto& v : vehicles_) {
        v.accel = accel_command(v, leader_in_lane(v.lane, v.position_m));
    }
}

void World::integration_phase() {
    // semi-implicit Euler: speed first, position with the new speed
    for (auto& v : vehicles_) {
        v.speed = std::max(0.0, v.speed + v.accel * cfg_.dt_s);
        v.position_m += v.speed * cfg_.dt_s;
    }
}

std::optional<int> World::decide_lane_change(std::size_t vehicle_index) const {
    const Vehicle& v = vehicles_[vehicle_index];
    const LaneChangeParams& lc = cfg_.lane_change;
    if (t_ - v.last_lane_change_s < lc.min_interval_s) return std::nullopt;
    // platooned vehicles hold their lane; their maneuvers ended at confirmation
    if (v.mode == ControlMode::CaccPlatooned) return std::nullopt;

    const bool bias_eligible =
        (v.klass == VehicleClass::Cacc &&
         (cfg_.network.policy == LanePolicy::Mml || cfg_.network.policy == LanePolicy::Dl ||
          cfg_.network.policy == LanePolicy::Dla)) ||
        (v.klass == VehicleClass::HovHuman &&
         (cfg_.network.policy == LanePolicy::Base || cfg_.network.policy == LanePolicy::Mml));

    const double a_now = accel_command(v, leader_in_lane(v.lane, v.position_m));

    std::optional<int> best_lane;
    double best_gain = lc.incentive_threshold;
    for (const int dlane : {+1, -1}) {
        const int target = v.lane + dlane;
        if (target < 0 || target >= cfg_.network.lane_count) continue;
        if (!cfg_.network.lane_allows(target, v.klass)) continue;
        if (cfg_.network.policy == LanePolicy::Dla &&
            (cfg_.network.is_managed_lane(target) || cfg_.network.is_managed_lane(v.lane)) &&
            !cfg_.network.in_access_zone(v.position_m)) {
            continue;  // managed-lane boundary may only be crossed in a zone
        }

        const Vehicle* new_leader = leader_in_lane(target, v.position_m);
        const Vehicle* new_follower = follower_in_lane(target, v.position_m);
        if (new_leader && bumper_gap(v, *new_leader) < lc.min_gap_m) continue;
        if (new_follower && bumper_gap(*new_follower, v) < lc.min_gap_m) continue;

        const double a_self = accel_command(v, new_leader);
        if (a_self < -lc.safe_decel) continue;
        double follower_loss = 0.0;
        if (new_follower) {
            const double a_follower_after = accel_command(*new_follower, &v);
            if (a_follower_after < -lc.safe_decel) continue;
            const double a_follower_before = accel_command(*new_follower, new_leader);
            follower_loss = std::max(0.0, a_follower_before - a_follower_after);
        }

        double gain = (a_self - a_now) - lc.politeness * follower_loss;
        if (bias_eligible && cfg_.network.is_managed_lane(target)) gain += lc.managed_bias;
        if (bias_eligible && cfg_.network.is_managed_lane(v.lane)) gain -= lc.managed_bias;

        if (gain > best_gain) {
            best_gain = gain;
            best_lane = target;
        }
    }
    return best_lane;
}

void World::lane_change_phase() {
    std::vector<std::size_t> order(vehicles_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (vehicles_[a].position_m != vehicles_[b].position_m) {
            return vehicles_[a].position_m > vehicles_[b].position_m;
        }
        return vehicles_[a].id < vehicles_[b].id;
    });
    for (const std::size_t i : order) {
        const auto target = decide_lane_change(i);
        if (!target) continue;
        Vehicle& v = vehicles_[i];
        auto& from_lane = lanes_[static_cast<std::size_t>(v.lane)];
        from_lane.erase(std::find(from_lane.begin(), from_lane.end(), i));
        v.lane = *target;
        v.last_lane_change_s = t_;
        auto& to_lane = lanes_[static_cast<std::size_t>(v.lane)];
        const auto pos = std::upper_bound(to_lane.begin(), to_lane.end(), i,
                                          [&](std::size_t a, std::size_t b) {
                                              if (vehicles_[a].position_m !=
                                                  vehicles_[b].position_m) {
                                                  return vehicles_[a].position_m <
                                                         vehicles_[b].position_m;
                                              }
                                              return vehicles_[a].id < vehicles_[b].id;
                                          });
        to_lane.insert(pos, i);
    }
}

void World::retirement_phase() {
    const double limit = cfg_.network.length_m;
    const auto removed = std::erase_if(vehicles_, [&](const Vehicle& v) {
        return v.position_m > limit;
    });
    retired_ += removed;
}

void World::spawn_phase() {
    const double rate = cfg_.demand.volume_vph / 3600.0 * cfg_.dt_s;
    if (rate > 0.0) {
        const int arrivals = rng_.poisson(rate);
        for (int n = 0; n < arrivals; ++n) {
            Pending p;
            const double u = rng_.uniform01();
            if (u < cfg_.demand.mpr) {
                p.klass = VehicleClass::Cacc;
            } else {
                p.klass = rng_.uniform01() < cfg_.demand.hov_fraction ? VehicleClass::HovHuman
                                                                      : VehicleClass::GpHuman;
            }
            const double lo = std::max(5.0, cfg_.demand.desired_speed_mean -
                                                3.0 * cfg_.demand.desired_speed_std);
            const double hi =
                cfg_.demand.desired_speed_mean + 3.0 * cfg_.demand.desired_speed_std;
            p.desired_speed = std::clamp(
                rng_.normal(cfg_.demand.desired_speed_mean, cfg_.demand.desired_speed_std), lo,
                hi);
            queue_.push_back(p);
        }
    }

    while (!queue_.empty()) {
        const Pending& p = queue_.front();
        std::vector<int> candidates;
        for (int lane = 0; lane < cfg_.network.lane_count; ++lane) {
            if (!cfg_.network.lane_allows(lane, p.klass)) continue;
            // under access control the managed lane is entered via zones, not at the gate
            if (cfg_.network.policy == LanePolicy::Dla && cfg_.network.is_managed_lane(lane)) {
                continue;
            }
            candidates.push_back(lane);
        }
        std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
            const auto ca = lanes_[static_cast<std::size_t>(a)].size();
            const auto cb = lanes_[static_cast<std::size_t>(b)].size();
            if (ca != cb) return ca < cb;
            return a < b;
        });
        int chosen = -1;
        double entry_speed = p.desired_speed;
        for (const int lane : candidates) {
            const auto& idx = lanes_[static_cast<std::size_t>(lane)];
            if (idx.empty()) {
                chosen = lane;
                entry_speed = p.desired_speed;
                break;
            }
            const Vehicle& tail = vehicles_[idx.front()];
            const double speed = std::min(p.desired_speed, tail.speed);
            const double gap0 = tail.position_m - cfg_.vehicle_length_m;
            const double required =
                cfg_.idm.min_gap_m + 0.9 * cfg_.idm.time_headway_s * speed;
            if (gap0 >= required) {
                chosen = lane;
                entry_speed = speed;
                break;
            }
        }
        if (chosen < 0) break;  // head of queue blocked; keep arrival order
        Vehicle v;
        v.id = next_id_++;
        v.klass = p.klass;
        v.lane = chosen;
        v.position_m = 0.0;
        v.speed = entry_speed;
        v.desired_speed = p.desired_speed;
        v.mode = ControlMode::Human;
        v.active_headway_s = cfg_.controller.headway_for(v.mode);
        max_desired_seen_ = std::max(max_desired_seen_, v.desired_speed);
        vehicles_.push_back(v);
        lanes_[static_cast<std::size_t>(chosen)].insert(
            lanes_[static_cast<std::size_t>(chosen)].begin(), vehicles_.size() - 1);
        ++spawned_;
        if (p.klass == VehicleClass::Cacc) cacc_spawn_order_.push_back(v.id);
        queue_.pop_front();
    }
}

void World::check_invariants() const {
    for (std::size_t lane = 0; lane < lanes_.size(); ++lane) {
        const auto& idx = lanes_[lane];
        for (std::size_t n = 1; n < idx.size(); ++n) {
            const Vehicle& follower = vehicles_[idx[n - 1]];
            const Vehicle& leader = vehicles_[idx[n]];
            if (!(bumper_gap(follower, leader) > 0.0)) {
                std::ostringstream msg;
                msg << "collision invariant violated at t=" << t_ << "s lane " << lane
                    << ": vehicle " << follower.id << " (x=" << follower.position_m
                    << ") into vehicle " << leader.id << " (x=" << leader.position_m << ")";
                throw InvariantError(msg.str());
            }
        }
    }
    for (const auto& v : vehicles_) {
        if (!cfg_.network.lane_allows(v.lane, v.klass)) {
            std::ostringstream msg;
            msg << "lane policy violated at t=" << t_ << "s: " << to_string(v.klass)
                << " vehicle " << v.id << " in lane " << v.lane;
            throw InvariantError(msg.str());
        }
        if (v.speed < 0.0 || v.speed > 1.2 * max_desired_seen_ + 1e-9) {
            std::ostringstream msg;
            msg << "speed bound violated at t=" << t_ << "s: vehicle " << v.id
                << " speed=" << v.speed;
            throw InvariantError(msg.str());
        }
        if (v.position_m < 0.0) {
            throw InvariantError("vehicle position before network start");
        }
        const bool headway_ok =
            v.mode == ControlMode::CaccPlatooned
                ? v.active_headway_s == cfg_.controller.short_headway_s
                : v.active_headway_s == cfg_.controller.long_headway_s;
        if (!headway_ok) {
            throw InvariantError("active headway inconsistent with control mode");
        }
    }
}

void World::step() {
    rebuild_lane_index();
    if (step_ % cfg_.control_every == 0) control_phase();
    acceleration_phase();
    integration_phase();
    rebuild_lane_index();
    lane_change_phase();
    retirement_phase();
    rebuild_lane_index();
    spawn_phase();
    ++step_;
    t_ = static_cast<double>(step_) * cfg_.dt_s;
    check_invariants();
}

}  // namespace dsrcsim
