#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qrng {

// Ordered bit sequence with exact bit-length tracking.
// Convention (same in memory and on disk): bit i lives in byte i/8 at
// position 7 - i%8, i.e. MSB-first within each byte. ADC samples are
// appended n_bits at a time, MSB first, in time order.
class BitStream {
public:
    BitStream() = default;
    explicit BitStream(uint64_t reserve_bits) { bytes_.reserve((reserve_bits + 7) / 8); }

    uint64_t size_bits() const { return nbits_; }
    uint64_t size_bytes() const { return (nbits_ + 7) / 8; }
    bool empty() const { return nbits_ == 0; }

    const uint8_t* data() const { return bytes_.data(); }
    std::span<const uint8_t> bytes() const { return {bytes_.data(), bytes_.size()}; }

    bool bit(uint64_t i) const {
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
    }

    void clear() {
        bytes_.clear();
        nbits_ = 0;
    }

    void push_bit(bool b) {
        if ((nbits_ & 7) == 0) bytes_.push_back(0);
        if (b) bytes_[nbits_ >> 3] |= static_cast<uint8_t>(1u << (7 - (nbits_ & 7)));
        ++nbits_;
    }

    // Append the top n_bits of `code`, MSB first.
    void push_code(uint32_t code, unsigned n_bits);

    // Append `count` bits read from `src` starting at bit offset `src_off`
    // (same MSB-first convention).
    void append_bits(const uint8_t* src, uint64_t src_off, uint64_t count);

    void append(const BitStream& other) { append_bits(other.data(), 0, other.nbits_); }

    // Copy `count` bits starting at `off` into `dst` (MSB-first, tail bits
    // of the last byte zeroed). `dst` must hold at least (count+7)/8 bytes.
    void extract(uint64_t off, uint64_t count, uint8_t* dst) const {
        extract_window(bytes_.data(), off, count, dst);
    }

    BitStream slice(uint64_t off, uint64_t count) const;

    uint64_t count_ones() const;

    // Flat binary file, final partial byte zero-padded.
    void write_binary(const std::filesystem::path& p) const;
    static BitStream read_binary(const std::filesystem::path& p);
    static BitStream read_binary(const std::filesystem::path& p, uint64_t nbits);

    // ASCII '0'/'1' export, bit-identical in content to the binary form.
    void write_ascii(const std::filesystem::path& p) const;
    static BitStream read_ascii(const std::filesystem::path& p);

    bool operator==(const BitStream& other) const {
        return nbits_ == other.nbits_ && bytes_ == other.bytes_;
    }

    static void extract_window(const uint8_t* src, uint64_t off, uint64_t count,
                               uint8_t* dst);

private:
    std::vector<uint8_t> bytes_;
    uint64_t nbits_ = 0;
};

// Unpack bits [off, off+count) into one byte per bit (values 0/1).
void unpack_bits(const BitStream& s, uint64_t off, uint64_t count, uint8_t* out);

} // namespace qrng
