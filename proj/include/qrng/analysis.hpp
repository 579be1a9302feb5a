#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "qrng/bitstream.hpp"
#include "qrng/source.hpp"

namespace qrng {

// Joint 2x2 counts of (x[t], y[t+lag]) over the overlap window.
struct JointCounts {
    uint64_t n11 = 0;
    uint64_t nx1 = 0;
    uint64_t ny1 = 0;
    uint64_t overlap = 0;
};

JointCounts joint_counts(const BitStream& x, const BitStream& y, int lag);

// Absolute normalized cross-correlation per lag: bits map to +-1, the full
// sequences are mean-removed and standardized, and
// rho[k] = |sum_t x~[t] y~[t+k]| / (N - |k|).
std::map<int, double> cross_correlation(const BitStream& x, const BitStream& y,
                                        int max_lag);

// Plug-in mutual information (bits) from the 2x2 joint frequency table.
double mutual_information(const BitStream& x, const BitStream& y, int lag);

// Null-hypothesis scale constants for the independence gates.
double mi_bias_bound(uint64_t n);     // (|X|-1)(|Y|-1) / (2 N ln 2)
double mi_standard_error(uint64_t n); // sqrt(2) / (2 N ln 2)

// Pairwise independence report with the acceptance thresholds applied:
// |rho[k]| < 5/sqrt(N) and mi[k] < bias + 5 SE (both at the lag's overlap).
struct CorrelationReport {
    uint32_t channel_a = 0;
    uint32_t channel_b = 0;
    uint64_t n_bits_used = 0;
    int max_lag = 0;
    double threshold_rho = 0.0;
    std::vector<int> lags;
    std::vector<double> rho;
    std::vector<double> mi;
    std::vector<double> mi_threshold;
    double max_abs_rho = 0.0;
    double max_mi = 0.0;
    bool pass = false;
};

CorrelationReport correlate_pair(const BitStream& x, const BitStream& y, int max_lag,
                                 uint32_t channel_a, uint32_t channel_b);

// -log2(max observed code frequency); requires >= 1e5 samples.
double empirical_min_entropy(const RawSampleBlock& block);

struct Histogram {
    std::vector<uint64_t> counts;
    uint64_t total = 0;
};

Histogram code_histogram(std::span<const uint32_t> codes, unsigned n_bits);

// Chi-square uniformity of the stream's byte values (whole bytes only).
struct ByteUniformity {
    std::array<uint64_t, 256> counts{};
    double chi2 = 0.0;
    double p_value = 0.0;
};

ByteUniformity byte_uniformity(const BitStream& bits);

} // namespace qrng
