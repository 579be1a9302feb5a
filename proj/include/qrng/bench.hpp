#pragma once

#include <cstdint>
#include <vector>

#include "qrng/config.hpp"
#include "qrng/toeplitz.hpp"

namespace qrng {

struct KernelBench {
    uint32_t m = 0;
    uint32_t n = 0;
    uint64_t input_bits = 0;
    std::vector<double> chunked_run_bps; // per repeat, input bits/s
    double chunked_best_bps = 0.0;
    double naive_best_bps = 0.0;
    double speedup = 0.0;        // chunked / naive
    double scaling_ratio = 0.0;  // time(full) / time(half), ~2 for linear kernels
    double stream_bps = 0.0;     // extract_stream path (buffering + packing included)
};

// Kernel-only measurement, single-threaded multiplies over random blocks;
// the naive reference runs on a reduced block count and is reported in the
// same units.
KernelBench bench_kernel(const ToeplitzSpec& spec, uint64_t input_bits, int repeats);

struct EndToEndBench {
    uint64_t samples = 0;
    double seconds = 0.0;
    double raw_bits_per_sec = 0.0;
    double out_bits_per_sec = 0.0;
};

EndToEndBench bench_end_to_end(const RunConfig& cfg, const ChannelConfig& cc,
                               uint64_t samples);

} // namespace qrng
