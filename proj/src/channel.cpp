#include "dsrcsim/channel.hpp"

#include <algorithm>
#include <stdexcept>

namespace dsrcsim {

BroadcastRoster::BroadcastRoster(std::vector<double> positions_m)
    : positions_(std::move(positions_m)) {
    std::sort(positions_.begin(), positions_.end());
}

std::size_t BroadcastRoster::count_within(double lo_m, double hi_m) const {
    if (hi_m < lo_m) return 0;
    const auto lo = std::lower_bound(positions_.begin(), positions_.end(), lo_m);
    const auto hi = std::upper_bound(positions_.begin(), positions_.end(), hi_m);
    return static_cast<std::size_t>(hi - lo);
}

double local_broadcaster_density(double receiver_pos_m, const BroadcastRoster& roster,
                                 double phi_m, bool receiver_in_roster) {
    if (!(phi_m > 0.0)) throw std::invalid_argument("local_broadcaster_density: phi must be > 0");
    std::size_t count = roster.count_within(receiver_pos_m - phi_m, receiver_pos_m + phi_m);
    if (receiver_in_roster && count > 0) --count;
    const double window_km = 2.0 * phi_m / 1000.0;
    return static_cast<double>(count) / window_km;
}

bool attempt_reception(double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("attempt_reception: probability outside [0,1]");
    }
    return rng.uniform01() < p;
}

ReceptionOutcome reception_trial(double receiver_pos_m, double x_m, const BroadcastRoster& roster,
                                 bool receiver_in_roster, const CoefficientTable& table,
                                 const DsrcParams& params, Rng& rng, ReceptionDiagnostics* diag,
                                 ChannelLoad* load_out) {
    if (x_m < 0.0) throw std::invalid_argument("reception_trial: distance must be non-negative");
    ChannelLoad load;
    auto probability = [&] {
        // Recomputed per attempt: the state is frozen within one step, but
        // the published loop routes back through the channel parameters.
        load.delta_veh_per_km =
            local_broadcaster_density(receiver_pos_m, roster, params.range_m, receiver_in_roster);
        load.xi_events =
            communication_density(load.delta_veh_per_km, params.range_m, params.frequency_hz);
        return reception_probability(table, x_m, load.xi_events, params.range_m, diag);
    };
    ReceptionOutcome out = run_reception_trial(probability, rng);
    if (load_out) *load_out = load;
    return out;
}

}  // namespace dsrcsim
