#include "dsrcsim/reception.hpp"

#include <cmath>
#include <stdexcept>

#include "dsrcsim/errors.hpp"

namespace dsrcsim {

void DsrcParams::validate() const {
    if (!(range_m > 0.0)) throw ConfigError("dsrc range_m must be positive");
    if (!(frequency_hz > 0.0)) throw ConfigError("dsrc frequency_hz must be positive");
}

double poly_h(const CoefficientTable& table, int i, double xi, double phi_m) {
    if (i < 1 || i > CoefficientTable::kPolyCount) {
        throw std::invalid_argument("poly_h: index i must be in 1..4, got " + std::to_string(i));
    }
    if (xi < 0.0 || phi_m < 0.0) {
        throw std::invalid_argument("poly_h: xi and phi must be non-negative");
    }
    const double p = phi_m / 1000.0;
    double xi_pow[5], p_pow[5];
    xi_pow[0] = p_pow[0] = 1.0;
    for (int d = 1; d <= 4; ++d) {
        xi_pow[d] = xi_pow[d - 1] * xi;
        p_pow[d] = p_pow[d - 1] * p;
    }
    // All 15 terms; omitting even the small ones distorts the fit badly.
    double sum = 0.0;
    for (int j = 0; j <= CoefficientTable::kMaxDegree; ++j) {
        for (int k = 0; j + k <= CoefficientTable::kMaxDegree; ++k) {
            sum += table.at(i, j, k) * xi_pow[j] * p_pow[k];
        }
    }
    return sum;
}

double reception_probability_raw(const CoefficientTable& table, double x_m, double xi,
                                 double phi_m) {
    if (x_m < 0.0) throw std::invalid_argument("reception: distance must be non-negative");
    if (xi < 0.0) throw std::invalid_argument("reception: xi must be non-negative");
    if (!(phi_m > 0.0)) throw std::invalid_argument("reception: phi must be positive");
    const double r = x_m / phi_m;
    double poly = 1.0;
    double r_pow = 1.0;
    for (int i = 1; i <= CoefficientTable::kPolyCount; ++i) {
        r_pow *= r;
        poly += poly_h(table, i, xi, phi_m) * r_pow;
    }
    return std::exp(-3.0 * r * r) * poly;
}

double reception_probability(const CoefficientTable& table, double x_m, double xi, double phi_m,
                             ReceptionDiagnostics* diag) {
    const double raw = reception_probability_raw(table, x_m, xi, phi_m);
    if (diag) {
        if (xi > kMaxCommunicationDensity) ++diag->xi_above_domain;
        if (x_m > phi_m) ++diag->x_beyond_range;
        if (raw > 1.0) ++diag->clamped_high;
        if (raw < 0.0) ++diag->clamped_low;
    }
    if (raw > 1.0) return 1.0;
    if (raw < 0.0) return 0.0;
    return raw;
}

double communication_density(double delta_veh_per_km, double phi_m, double f_hz) {
    if (delta_veh_per_km < 0.0 || phi_m < 0.0 || f_hz < 0.0) {
        throw std::invalid_argument("communication_density: arguments must be non-negative");
    }
    return delta_veh_per_km * (phi_m / 1000.0) * f_hz;
}

}  // namespace dsrcsim
