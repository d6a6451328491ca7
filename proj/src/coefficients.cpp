#include "dsrcsim/coefficients.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dsrcsim/errors.hpp"

namespace dsrcsim {

namespace {

// Rows in canonical (j,k) order per index i:
// (0,0) (0,1) (0,2) (0,3) (0,4) (1,0) (1,1) (1,2) (1,3) (2,0) (2,1) (2,2)
// (3,0) (3,1) (4,0)
constexpr std::array<double, 60> kBuiltinValues = {
    // i = 1
    0.0209865, 0.000418109, -4.30875e-06, 1.00775e-08, -7.32254e-12,
    -9.66304e-07, 4.00928e-09, -1.88707e-11, 3.25406e-14,
    -1.72786e-11, 2.13587e-14, -5.05716e-17,
    5.09506e-17, 3.16577e-20,
    -7.91921e-23,
    // i = 2
    2.24743, 0.00498750, -7.22232e-06, 1.69755e-08, -2.94381e-11,
    7.84884e-07, -7.31274e-08, 2.98549e-10, -3.24982e-13,
    2.28533e-10, -2.66510e-13, 8.64273e-17,
    -5.89802e-16, 4.07120e-19,
    3.55262e-22,
    // i = 3
    2.56426, -0.0227008, 7.50391e-05, -1.81469e-07, 2.02182e-10,
    2.82287e-05, 1.56259e-07, -8.50944e-10, 7.59094e-13,
    -7.09939e-10, 1.02847e-12, 1.80250e-16,
    1.34371e-15, -1.85451e-18,
    -3.01956e-22,
    // i = 4; (1,0) carries the documented exponent correction
    2.41146, 0.0191490, -6.92678e-07, 1.79917e-07, -2.07263e-10,
    -9.32859e-05, -2.56738e-08, 6.24415e-10, -3.57571e-13,
    6.77403e-10, -1.13894e-16, -4.05333e-16,
    -9.64188e-16, 1.85043e-18,
    3.69652e-23,
};

// Offset of (j,k) within one polynomial's 15-slot block, canonical order.
int pair_offset(int j, int k) {
    // j rows of decreasing width: 5, 4, 3, 2, 1
    static constexpr int row_start[5] = {0, 5, 9, 12, 14};
    return row_start[j] + k;
}

}  // namespace

bool CoefficientTable::valid_index(int i, int j, int k) {
    return i >= 1 && i <= kPolyCount && j >= 0 && k >= 0 && j + k <= kMaxDegree;
}

int CoefficientTable::slot(int i, int j, int k) {
    if (!valid_index(i, j, k)) {
        throw std::invalid_argument("coefficient index out of range: i=" + std::to_string(i) +
                                    " j=" + std::to_string(j) + " k=" + std::to_string(k));
    }
    return (i - 1) * kPairsPerPoly + pair_offset(j, k);
}

double CoefficientTable::at(int i, int j, int k) const { return values_[slot(i, j, k)]; }

void CoefficientTable::set(int i, int j, int k, double value) { values_[slot(i, j, k)] = value; }

const CoefficientTable& CoefficientTable::builtin() {
    static const CoefficientTable table = [] {
        CoefficientTable t;
        t.values_ = kBuiltinValues;
        return t;
    }();
    return table;
}

CoefficientTable CoefficientTable::from_stream(std::istream& in, const std::string& origin) {
    CoefficientTable table;
    std::array<bool, kEntryCount> seen{};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        int i, j, k;
        double value;
        if (!(row >> i)) continue;  // blank or comment-only line
        if (!(row >> j >> k >> value)) {
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected 'i j k value'");
        }
        std::string extra;
        if (row >> extra) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": trailing content '" +
                              extra + "'");
        }
        if (!valid_index(i, j, k)) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": invalid index (i=" +
                              std::to_string(i) + ", j=" + std::to_string(j) + ", k=" +
                              std::to_string(k) + ")");
        }
        const int s = slot(i, j, k);
        if (seen[s]) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate entry (i=" +
                              std::to_string(i) + ", j=" + std::to_string(j) + ", k=" +
                              std::to_string(k) + ")");
        }
        seen[s] = true;
        table.values_[s] = value;
    }
    for (int i = 1; i <= kPolyCount; ++i) {
        for (int j = 0; j <= kMaxDegree; ++j) {
            for (int k = 0; j + k <= kMaxDegree; ++k) {
                if (!seen[slot(i, j, k)]) {
                    throw ConfigError(origin + ": missing entry (i=" + std::to_string(i) +
                                      ", j=" + std::to_string(j) + ", k=" + std::to_string(k) +
                                      ")");
                }
            }
        }
    }
    return table;
}

CoefficientTable CoefficientTable::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open coefficient table: " + path);
    return from_stream(in, path);
}

std::uint64_t CoefficientTable::checksum() const {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buf[64];
    for (int i = 1; i <= kPolyCount; ++i) {
        for (int j = 0; j <= kMaxDegree; ++j) {
            for (int k = 0; j + k <= kMaxDegree; ++k) {
                const int n =
                    std::snprintf(buf, sizeof buf, "%d %d %d %.17g\n", i, j, k, at(i, j, k));
                for (int c = 0; c < n; ++c) {
                    hash ^= static_cast<unsigned char>(buf[c]);
                    hash *= 0x100000001b3ull;
                }
            }
        }
    }
    return hash;
}

void CoefficientTable::write(std::ostream& out) const {
    char buf[64];
    for (int i = 1; i <= kPolyCount; ++i) {
        for (int j = 0; j <= kMaxDegree; ++j) {
            for (int k = 0; j + k <= kMaxDegree; ++k) {
                std::snprintf(buf, sizeof buf, "%d %d %d %.17g\n", i, j, k, at(i, j, k));
                out << buf;
            }
        }
    }
}

}  // namespace dsrcsim
