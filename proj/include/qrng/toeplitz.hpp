#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qrng/bitstream.hpp"

namespace qrng {

// m x n binary Toeplitz matrix defined by m + n - 1 seed bits under the
// convention T[i][j] = seed[(n - 1) + i - j].
struct ToeplitzSpec {
    uint32_t m = 0;
    uint32_t n = 0;
    BitStream seed;
};

ToeplitzSpec build_toeplitz(BitStream seed, uint32_t m, uint32_t n);

bool toeplitz_entry(const ToeplitzSpec& spec, uint32_t i, uint32_t j);

// Serial reference: the naive double loop over matrix entries. Kept as the
// correctness oracle for the chunked kernel and as the benchmark baseline.
// x holds ceil(n/8) bytes MSB-first (tail bits zero), y receives ceil(m/8).
void multiply_naive(const ToeplitzSpec& spec, const uint8_t* x, uint8_t* y);

// Word-packed kernel mirroring the three pipeline stages: table building
// from the seed, per-chunk submatrix products, and accumulation into packed
// output words. Each 8-column submatrix of T is expanded once into all 256
// column combinations; a block multiply is then one table row XOR per input
// byte. Bit-identical to multiply_naive.
class ToeplitzKernel {
public:
    explicit ToeplitzKernel(const ToeplitzSpec& spec);

    void multiply(const uint8_t* x, uint8_t* y) const;

    uint32_t m() const { return m_; }
    uint32_t n() const { return n_; }
    size_t input_bytes() const { return (n_ + 7) / 8; }
    size_t output_bytes() const { return (m_ + 7) / 8; }

private:
    uint32_t m_ = 0;
    uint32_t n_ = 0;
    size_t row_words_ = 0;
    uint8_t last_mask_ = 0xFF;
    std::vector<uint64_t> table_; // [input byte position][byte value][row word]
};

// Streaming block extractor: consumes the input in n-bit blocks, emits m
// bits per block in input order; a trailing partial block stays buffered
// until finish() discards it.
class ExtractorState {
public:
    explicit ExtractorState(ToeplitzSpec spec);

    const ToeplitzSpec& spec() const { return spec_; }

    // Processes as many whole blocks as available, appending output bits.
    void feed(const BitStream& input, BitStream& output);
    BitStream feed(const BitStream& input);

    // Discards any buffered partial block and returns its size in bits.
    uint64_t finish();

    uint64_t blocks_processed() const { return blocks_; }
    uint64_t bits_in() const { return bits_in_; }
    uint64_t bits_out() const { return blocks_ * spec_.m; }
    uint64_t buffer_bits() const { return buffer_bits_; }

private:
    ToeplitzSpec spec_;
    ToeplitzKernel kernel_;
    std::vector<uint8_t> buffer_; // < n bits of pending input
    uint64_t buffer_bits_ = 0;
    uint64_t blocks_ = 0;
    uint64_t bits_in_ = 0;
};

// Seed provisioning. Files are flat binary, MSB-first, and must hold at
// least m + n - 1 bits; the PRNG route is deterministic in (seed, stream).
ToeplitzSpec seeded_spec_from_file(const std::filesystem::path& p, uint32_t m, uint32_t n);
ToeplitzSpec seeded_spec_from_prng(uint64_t prng_seed, uint32_t stream, uint32_t m,
                                   uint32_t n);

} // namespace qrng
