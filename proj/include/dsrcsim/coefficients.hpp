#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace dsrcsim {

// The 60 fitted coefficients h_i^{(j,k)} of the empirical reception
// polynomial: four polynomial indices i (1..4), each with the 15 exponent
// pairs (j,k), j+k <= 4. j is the exponent of the communication density,
// k the exponent of the transmission range.
class CoefficientTable {
public:
    static constexpr int kPolyCount = 4;
    static constexpr int kMaxDegree = 4;
    static constexpr int kPairsPerPoly = 15;
    static constexpr int kEntryCount = 60;

    // Compiled-in table: the adopted transcription of the published fit.
    // One entry, i=4 (j,k)=(1,0), is printed with a garbled exponent in the
    // source table ("e05"); it is carried here as -9.32859e-05, the only
    // reading consistent with its column.
    static const CoefficientTable& builtin();

    // Plain-text load, one "i j k value" row per coefficient. Requires all
    // 60 slots exactly once; throws ConfigError otherwise.
    static CoefficientTable from_file(const std::string& path);
    static CoefficientTable from_stream(std::istream& in, const std::string& origin);

    double at(int i, int j, int k) const;
    void set(int i, int j, int k, double value);

    static bool valid_index(int i, int j, int k);

    // FNV-1a over the canonical "i j k %.17g" listing; detects any edit.
    std::uint64_t checksum() const;

    // Canonical row order: i ascending, then j, then k.
    void write(std::ostream& out) const;

    bool operator==(const CoefficientTable&) const = default;

private:
    static int slot(int i, int j, int k);
    std::array<double, kEntryCount> values_{};
};

}  // namespace dsrcsim
