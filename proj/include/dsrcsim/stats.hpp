#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dsrcsim {

// Distribution summary for violin-style export.
// Variance is the sample convention (n-1); quantiles use linear
// interpolation between order statistics. Both conventions are declared
// in the CSV header line.
struct SampleStats {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double variance = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
};

// q in [0,1] over an ascending-sorted range.
double quantile_sorted(std::span<const double> sorted, double q);

SampleStats summarize(std::vector<double> samples);

}  // namespace dsrcsim
