#include "qrng/bitstream.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>

#include "qrng/errors.hpp"

namespace qrng {

void BitStream::push_code(uint32_t code, unsigned n_bits) {
    for (unsigned k = 0; k < n_bits; ++k) {
        push_bit((code >> (n_bits - 1 - k)) & 1u);
    }
}

void BitStream::extract_window(const uint8_t* src, uint64_t off, uint64_t count,
                               uint8_t* dst) {
    const uint64_t nbytes = (count + 7) / 8;
    const unsigned shift = static_cast<unsigned>(off & 7);
    const uint8_t* p = src + (off >> 3);
    if (shift == 0) {
        std::memcpy(dst, p, nbytes);
    } else {
        // Need one byte past the last full read when the window straddles it.
        const uint64_t avail_last = off + count; // absolute end bit
        for (uint64_t b = 0; b < nbytes; ++b) {
            uint8_t hi = static_cast<uint8_t>(p[b] << shift);
            uint8_t lo = 0;
            const uint64_t next_byte_first_bit = ((off >> 3) + b + 1) * 8;
            if (next_byte_first_bit < avail_last) lo = p[b + 1] >> (8 - shift);
            dst[b] = hi | lo;
        }
    }
    if (count & 7) dst[nbytes - 1] &= static_cast<uint8_t>(0xFFu << (8 - (count & 7)));
}

void BitStream::append_bits(const uint8_t* src, uint64_t src_off, uint64_t count) {
    if (count == 0) return;
    bytes_.resize((nbits_ + count + 7) / 8, 0);
    const unsigned dst_shift = static_cast<unsigned>(nbits_ & 7);
    uint8_t* dst = bytes_.data() + (nbits_ >> 3);
    const uint64_t nbytes = (count + 7) / 8;
    std::vector<uint8_t> tmp(nbytes);
    extract_window(src, src_off, count, tmp.data());
    if (dst_shift == 0) {
        std::memcpy(dst, tmp.data(), nbytes);
    } else {
        for (uint64_t b = 0; b < nbytes; ++b) {
            dst[b] |= tmp[b] >> dst_shift;
            const uint8_t carry = static_cast<uint8_t>(tmp[b] << (8 - dst_shift));
            if (carry) dst[b + 1] |= carry;
        }
    }
    nbits_ += count;
    bytes_.resize((nbits_ + 7) / 8);
    // Keep tail bits of the last byte zero.
    if (nbits_ & 7) bytes_.back() &= static_cast<uint8_t>(0xFFu << (8 - (nbits_ & 7)));
}

BitStream BitStream::slice(uint64_t off, uint64_t count) const {
    if (off + count > nbits_) throw std::invalid_argument("BitStream::slice out of range");
    BitStream out(count);
    out.append_bits(bytes_.data(), off, count);
    return out;
}

uint64_t BitStream::count_ones() const {
    uint64_t ones = 0;
    for (uint8_t b : bytes_) ones += std::popcount(b);
    return ones;
}

void BitStream::write_binary(const std::filesystem::path& p) const {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + p.string());
    f.write(reinterpret_cast<const char*>(bytes_.data()),
            static_cast<std::streamsize>(bytes_.size()));
    if (!f) throw IoError("write failed: " + p.string());
}

BitStream BitStream::read_binary(const std::filesystem::path& p) {
    std::error_code ec;
    const auto sz = std::filesystem::file_size(p, ec);
    if (ec) throw IoError("cannot stat: " + p.string());
    return read_binary(p, sz * 8);
}

BitStream BitStream::read_binary(const std::filesystem::path& p, uint64_t nbits) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open: " + p.string());
    BitStream s;
    s.bytes_.resize((nbits + 7) / 8);
    f.read(reinterpret_cast<char*>(s.bytes_.data()),
           static_cast<std::streamsize>(s.bytes_.size()));
    if (static_cast<uint64_t>(f.gcount()) != s.bytes_.size())
        throw IoError("short read: " + p.string());
    s.nbits_ = nbits;
    if (nbits & 7) s.bytes_.back() &= static_cast<uint8_t>(0xFFu << (8 - (nbits & 7)));
    return s;
}

void BitStream::write_ascii(const std::filesystem::path& p) const {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + p.string());
    std::string buf;
    buf.reserve(1 << 16);
    for (uint64_t i = 0; i < nbits_; ++i) {
        buf.push_back(bit(i) ? '1' : '0');
        if (buf.size() == (1 << 16)) {
            f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
    }
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("write failed: " + p.string());
}

BitStream BitStream::read_ascii(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open: " + p.string());
    BitStream s;
    char c;
    while (f.get(c)) {
        if (c == '0') s.push_bit(false);
        else if (c == '1') s.push_bit(true);
        else if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
        else throw IoError("unexpected character in ASCII bit file: " + p.string());
    }
    return s;
}

void unpack_bits(const BitStream& s, uint64_t off, uint64_t count, uint8_t* out) {
    for (uint64_t i = 0; i < count; ++i) out[i] = s.bit(off + i) ? 1 : 0;
}

} // namespace qrng
