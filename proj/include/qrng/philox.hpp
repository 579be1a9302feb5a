#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qrng {

// Philox4x32-10 counter-based PRNG (Salmon et al., SC'11).
// The generator is a pure function of (key, counter), so any sample index
// can be produced without sequential state: parallel loops over indices
// yield the same values as a serial pass, and distinct stream/domain words
// give statistically independent substreams under one seed.
class Philox4x32 {
public:
    using Block = std::array<uint32_t, 4>;

    explicit Philox4x32(uint64_t seed)
        : key0_(static_cast<uint32_t>(seed)),
          key1_(static_cast<uint32_t>(seed >> 32)) {}

    Block operator()(Block ctr) const {
        uint32_t k0 = key0_;
        uint32_t k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            const uint64_t p0 = static_cast<uint64_t>(MULT0) * ctr[0];
            const uint64_t p1 = static_cast<uint64_t>(MULT1) * ctr[2];
            const Block next = {
                static_cast<uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
                static_cast<uint32_t>(p1),
                static_cast<uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
                static_cast<uint32_t>(p0),
            };
            ctr = next;
            k0 += WEYL0;
            k1 += WEYL1;
        }
        return ctr;
    }

    // Counter layout used throughout: (index lo, index hi, stream, domain).
    Block at(uint64_t index, uint32_t stream, uint32_t domain) const {
        return (*this)({static_cast<uint32_t>(index),
                        static_cast<uint32_t>(index >> 32), stream, domain});
    }

    uint64_t word64(uint64_t index, uint32_t stream, uint32_t domain) const {
        const Block b = at(index, stream, domain);
        return (static_cast<uint64_t>(b[0]) << 32) | b[1];
    }

private:
    static constexpr uint32_t MULT0 = 0xD2511F53u;
    static constexpr uint32_t MULT1 = 0xCD9E8D57u;
    static constexpr uint32_t WEYL0 = 0x9E3779B9u;
    static constexpr uint32_t WEYL1 = 0xBB67AE85u;

    uint32_t key0_;
    uint32_t key1_;
};

// Domain separators for the counter's fourth word.
namespace domain {
constexpr uint32_t noise = 1;         // per-channel Gaussian tracks
constexpr uint32_t toeplitz_seed = 2; // extractor seed material
constexpr uint32_t generic = 3;       // uniform bits for tests/tools
} // namespace domain

// One counter block -> one standard-normal pair via Box-Muller,
// built from two 53-bit uniforms. u1 lies in (0,1], u2 in [0,1).
inline void gaussian_pair(const Philox4x32::Block& b, double& z0, double& z1) {
    const uint64_t u = (static_cast<uint64_t>(b[0]) << 32) | b[1];
    const uint64_t v = (static_cast<uint64_t>(b[2]) << 32) | b[3];
    const double u1 = static_cast<double>((u >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(v >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 6.283185307179586476925286766559 * u2;
    z0 = r * std::cos(phi);
    z1 = r * std::sin(phi);
}

} // namespace qrng
