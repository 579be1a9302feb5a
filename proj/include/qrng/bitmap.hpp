#pragma once

#include <cstdint>
#include <filesystem>

#include "qrng/bitstream.hpp"

namespace qrng {

// Row-major binary image; 1 = black pixel in the portable-bitmap sense.
struct BitmapImage {
    uint32_t width = 0;
    uint32_t height = 0;
    BitStream bits; // width * height bits

    bool pixel(uint32_t x, uint32_t y) const {
        return bits.bit(static_cast<uint64_t>(y) * width + x);
    }
};

BitmapImage bitmap_from_bits(const BitStream& src, uint32_t width, uint32_t height,
                             uint64_t bit_offset = 0);

BitmapImage xor_bitmap(const BitmapImage& a, const BitmapImage& b);

// P1 is ASCII, P4 packs eight pixels per byte with zero-padded row ends.
void write_pbm_p1(const std::filesystem::path& p, const BitmapImage& img);
void write_pbm_p4(const std::filesystem::path& p, const BitmapImage& img);

} // namespace qrng
