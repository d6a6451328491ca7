#pragma once

#include <cstdint>

#include "dsrcsim/coefficients.hpp"

namespace dsrcsim {

// Upper edge of the communication-density domain covered by the fit.
inline constexpr double kMaxCommunicationDensity = 4400.0;

struct DsrcParams {
    double range_m = 300.0;      // transmission power range
    double frequency_hz = 10.0;  // broadcast rate

    void validate() const;  // throws ConfigError unless both positive
};

struct ChannelLoad {
    double delta_veh_per_km = 0.0;  // broadcasting-vehicle linear density
    double xi_events = 0.0;         // communication density, events/s
};

// Caller-owned counters; the model functions themselves are stateless.
struct ReceptionDiagnostics {
    std::uint64_t clamped_high = 0;
    std::uint64_t clamped_low = 0;
    std::uint64_t xi_above_domain = 0;
    std::uint64_t x_beyond_range = 0;

    void merge(const ReceptionDiagnostics& other) {
        clamped_high += other.clamped_high;
        clamped_low += other.clamped_low;
        xi_above_domain += other.xi_above_domain;
        x_beyond_range += other.x_beyond_range;
    }
    std::uint64_t total() const {
        return clamped_high + clamped_low + xi_above_domain + x_beyond_range;
    }
};

// h_i(xi, phi): full 15-term two-variable polynomial, no term dropped.
// The range variable enters in kilometers (phi_m is converted internally);
// the meter reading fails the published curve-shape checks.
// i outside 1..4 or negative arguments throw std::invalid_argument.
double poly_h(const CoefficientTable& table, int i, double xi, double phi_m);

// Unclamped value of the reception model; used by diagnostics and the
// coefficient sanity suite.
double reception_probability_raw(const CoefficientTable& table, double x_m,
                                 double xi, double phi_m);

// Probability that a single broadcast at sender-receiver distance x_m is
// received under channel load xi, clamped to [0,1]. Out-of-domain inputs
// (xi > 4400 or x > phi) still evaluate; they are tallied in diag when
// provided, as are clamp events.
double reception_probability(const CoefficientTable& table, double x_m,
                             double xi, double phi_m,
                             ReceptionDiagnostics* diag = nullptr);

// xi = delta * phi * f with phi converted to kilometers, yielding the
// expected number of broadcast events per second sensed within one range.
double communication_density(double delta_veh_per_km, double phi_m, double f_hz);

}  // namespace dsrcsim
