#include "dsrcsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsrcsim {

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

SampleStats summarize(std::vector<double> samples) {
    SampleStats s;
    s.n = samples.size();
    if (samples.empty()) return s;
    std::sort(samples.begin(), samples.end());
    double sum = 0.0;
    for (const double v : samples) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    double sq = 0.0;
    for (const double v : samples) sq += (v - s.mean) * (v - s.mean);
    s.variance = s.n > 1 ? sq / static_cast<double>(s.n - 1) : 0.0;
    s.min = samples.front();
    s.max = samples.back();
    s.median = quantile_sorted(samples, 0.5);
    s.q1 = quantile_sorted(samples, 0.25);
    s.q3 = quantile_sorted(samples, 0.75);
    return s;
}

}  // namespace dsrcsim
