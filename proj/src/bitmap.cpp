#include "qrng/bitmap.hpp"

#include <fstream>
#include <stdexcept>

#include "qrng/errors.hpp"

namespace qrng {

BitmapImage bitmap_from_bits(const BitStream& src, uint32_t width, uint32_t height,
                             uint64_t bit_offset) {
    const uint64_t need = static_cast<uint64_t>(width) * height;
    if (width == 0 || height == 0)
        throw std::invalid_argument("bitmap_from_bits: empty dimensions");
    if (bit_offset + need > src.size_bits())
        throw std::invalid_argument("bitmap_from_bits: source holds " +
                                    std::to_string(src.size_bits()) + " bits, need " +
                                    std::to_string(bit_offset + need));
    BitmapImage img;
    img.width = width;
    img.height = height;
    img.bits = src.slice(bit_offset, need);
    return img;
}

BitmapImage xor_bitmap(const BitmapImage& a, const BitmapImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("xor_bitmap: dimension mismatch");
    BitmapImage out;
    out.width = a.width;
    out.height = a.height;
    const uint64_t n = a.bits.size_bits();
    for (uint64_t i = 0; i < n; ++i) out.bits.push_bit(a.bits.bit(i) != b.bits.bit(i));
    return out;
}

void write_pbm_p1(const std::filesystem::path& p, const BitmapImage& img) {
    std::ofstream f(p);
    if (!f) throw IoError("cannot open for writing: " + p.string());
    f << "P1\n" << img.width << " " << img.height << "\n";
    for (uint32_t y = 0; y < img.height; ++y) {
        for (uint32_t x = 0; x < img.width; ++x) {
            f << (img.pixel(x, y) ? '1' : '0');
            if (x + 1 < img.width) f << ' ';
        }
        f << '\n';
    }
    if (!f) throw IoError("write failed: " + p.string());
}

void write_pbm_p4(const std::filesystem::path& p, const BitmapImage& img) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + p.string());
    f << "P4\n" << img.width << " " << img.height << "\n";
    const uint32_t row_bytes = (img.width + 7) / 8;
    std::vector<uint8_t> row(row_bytes);
    for (uint32_t y = 0; y < img.height; ++y) {
        std::fill(row.begin(), row.end(), 0);
        for (uint32_t x = 0; x < img.width; ++x)
            if (img.pixel(x, y)) row[x >> 3] |= static_cast<uint8_t>(0x80u >> (x & 7));
        f.write(reinterpret_cast<const char*>(row.data()), row_bytes);
    }
    if (!f) throw IoError("write failed: " + p.string());
}

} // namespace qrng
