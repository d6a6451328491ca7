#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dsrcsim/reception.hpp"
#include "dsrcsim/rng.hpp"

namespace dsrcsim {

// Longitudinal positions of every vehicle broadcasting this step,
// network-wide with all lanes pooled, sorted ascending.
class BroadcastRoster {
public:
    BroadcastRoster() = default;
    explicit BroadcastRoster(std::vector<double> positions_m);

    std::span<const double> positions() const { return positions_; }
    std::size_t size() const { return positions_.size(); }

    // Number of broadcasters inside the closed interval [lo_m, hi_m].
    std::size_t count_within(double lo_m, double hi_m) const;

private:
    std::vector<double> positions_;
};

inline constexpr int kMaxAttempts = 5;

struct ReceptionOutcome {
    bool success = false;
    int attempts_used = 0;
    double probability_used = 0.0;  // probability of the final attempt
};

// Linear density (veh/km) of broadcasters within +-phi_m of the receiver,
// both directions, lanes pooled. receiver_in_roster excludes the
// receiver's own roster entry from the count.
double local_broadcaster_density(double receiver_pos_m, const BroadcastRoster& roster,
                                 double phi_m, bool receiver_in_roster);

// One Bernoulli experiment: uniform draw on [0,1), success iff u < p.
// Consumes exactly one draw. p outside [0,1] throws std::invalid_argument.
bool attempt_reception(double p, Rng& rng);

// Up-to-five-attempt transmission loop over an arbitrary per-attempt
// probability source; stops at the first success. Attempts are
// independent experiments.
template <typename ProbFn>
ReceptionOutcome run_reception_trial(ProbFn&& probability, Rng& rng) {
    ReceptionOutcome out;
    for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        out.attempts_used = attempt;
        out.probability_used = probability();
        if (attempt_reception(out.probability_used, rng)) {
            out.success = true;
            break;
        }
    }
    return out;
}

// Full per-vehicle reception test: on every attempt the local density,
// communication density and reception probability are recomputed before
// the random-number test, following the published procedure. x_m is the
// distance to the vehicle's platoon predecessor. load_out, when given,
// receives the channel load used on the final attempt.
ReceptionOutcome reception_trial(double receiver_pos_m, double x_m,
                                 const BroadcastRoster& roster, bool receiver_in_roster,
                                 const CoefficientTable& table, const DsrcParams& params,
                                 Rng& rng, ReceptionDiagnostics* diag = nullptr,
                                 ChannelLoad* load_out = nullptr);

}  // namespace dsrcsim
