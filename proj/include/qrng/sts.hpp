#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qrng/bitstream.hpp"

namespace qrng {

// Parameters for the tests that take one. Zero means "derive from the
// block length": block-frequency M = max(20, n/100); serial m and
// approximate-entropy m default to 10 and 8, which keep expected pattern
// counts comfortably large for the 1e5..1e6-bit blocks used here.
struct StsParams {
    uint32_t block_frequency_m = 0;
    uint32_t serial_m = 10;
    uint32_t apen_m = 8;

    uint32_t resolved_block_frequency_m(uint64_t block_len) const;
};

// Individual tests; `bits` is one byte per bit (0/1), length n.
double sts_monobit(const uint8_t* bits, size_t n);
double sts_block_frequency(const uint8_t* bits, size_t n, uint32_t m);
double sts_runs(const uint8_t* bits, size_t n);
double sts_longest_run(const uint8_t* bits, size_t n);
std::pair<double, double> sts_cumulative_sums(const uint8_t* bits, size_t n);
std::pair<double, double> sts_serial(const uint8_t* bits, size_t n, uint32_t m);
double sts_approximate_entropy(const uint8_t* bits, size_t n, uint32_t m);
double sts_dft(const uint8_t* bits, size_t n);

// (1-alpha) -/+ 3*sqrt((1-alpha)*alpha/n).
std::pair<double, double> proportion_interval(double alpha, uint64_t n_blocks);

struct TestResult {
    std::string name;
    std::vector<double> p_values;
    uint64_t pass_count = 0;
    double proportion = 0.0;
    bool pass = false;
};

struct TestReport {
    double alpha = 0.0;
    uint64_t n_blocks = 0;
    uint64_t block_len = 0;
    double interval_lo = 0.0;
    double interval_hi = 0.0;
    StsParams params;
    std::vector<TestResult> tests;
    bool all_pass = false;
};

// Runs the eight-test subset on n_blocks consecutive blocks of block_len
// bits; a block passes a test when p >= alpha, and a test passes when its
// pass proportion falls inside the three-sigma interval.
TestReport nist_subset(const BitStream& bits, uint64_t block_len, uint64_t n_blocks,
                       double alpha, const StsParams& params = {});

} // namespace qrng
