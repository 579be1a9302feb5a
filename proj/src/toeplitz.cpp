#include "qrng/toeplitz.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>

#include "qrng/errors.hpp"
#include "qrng/philox.hpp"

namespace qrng {

ToeplitzSpec build_toeplitz(BitStream seed, uint32_t m, uint32_t n) {
    if (m < 1 || n < 1) throw std::invalid_argument("build_toeplitz: m, n must be >= 1");
    const uint64_t want = static_cast<uint64_t>(m) + n - 1;
    if (seed.size_bits() != want)
        throw std::invalid_argument("build_toeplitz: seed holds " +
                                    std::to_string(seed.size_bits()) + " bits, expected m + n - 1 = " +
                                    std::to_string(want));
    return {m, n, std::move(seed)};
}

bool toeplitz_entry(const ToeplitzSpec& spec, uint32_t i, uint32_t j) {
    return spec.seed.bit(static_cast<uint64_t>(spec.n) - 1 + i - j);
}

void multiply_naive(const ToeplitzSpec& spec, const uint8_t* x, uint8_t* y) {
    const uint32_t m = spec.m;
    const uint32_t n = spec.n;
    std::memset(y, 0, (m + 7) / 8);
    for (uint32_t i = 0; i < m; ++i) {
        unsigned acc = 0;
        for (uint32_t j = 0; j < n; ++j) {
            const unsigned xj = (x[j >> 3] >> (7 - (j & 7))) & 1u;
            acc ^= xj & static_cast<unsigned>(toeplitz_entry(spec, i, j));
        }
        if (acc) y[i >> 3] |= static_cast<uint8_t>(1u << (7 - (i & 7)));
    }
}

ToeplitzKernel::ToeplitzKernel(const ToeplitzSpec& spec) : m_(spec.m), n_(spec.n) {
    const size_t row_bytes = (m_ + 7) / 8;
    row_words_ = (row_bytes + 7) / 8;
    const size_t n_pos = (n_ + 7) / 8;
    if (n_ & 7) last_mask_ = static_cast<uint8_t>(0xFFu << (8 - (n_ & 7)));
    table_.assign(n_pos * 256 * row_words_, 0);

    // Stage 1, matrix building: expand each 8-column submatrix into the
    // XOR table of its 256 column subsets.
    std::vector<uint8_t> col(row_words_ * 8);
    for (size_t p = 0; p < n_pos; ++p) {
        uint64_t* chunk = table_.data() + p * 256 * row_words_;
        for (unsigned u = 0; u < 8; ++u) {
            const uint64_t j = 8 * p + u;
            if (j >= n_) continue;
            std::memset(col.data(), 0, col.size());
            spec.seed.extract(n_ - 1 - j, m_, col.data());
            uint64_t* entry = chunk + (static_cast<size_t>(1u << (7 - u))) * row_words_;
            std::memcpy(entry, col.data(), row_words_ * 8);
        }
        for (unsigned v = 1; v < 256; ++v) {
            if (std::popcount(v) < 2) continue;
            const unsigned rest = v & (v - 1);
            const unsigned low = v ^ rest;
            const uint64_t* a = chunk + static_cast<size_t>(rest) * row_words_;
            const uint64_t* b = chunk + static_cast<size_t>(low) * row_words_;
            uint64_t* entry = chunk + static_cast<size_t>(v) * row_words_;
            for (size_t w = 0; w < row_words_; ++w) entry[w] = a[w] ^ b[w];
        }
    }
}

void ToeplitzKernel::multiply(const uint8_t* x, uint8_t* y) const {
    const size_t n_pos = (n_ + 7) / 8;
    const size_t rw = row_words_;
    // Stages 2-3: one submatrix product (table row) per input byte,
    // accumulated into the packed output words.
    uint64_t acc_small[16];
    std::vector<uint64_t> acc_big;
    uint64_t* acc = rw <= 16 ? acc_small : (acc_big.resize(rw), acc_big.data());
    std::memset(acc, 0, rw * 8);
    for (size_t p = 0; p < n_pos; ++p) {
        uint8_t v = x[p];
        if (p + 1 == n_pos) v &= last_mask_;
        if (!v) continue;
        const uint64_t* row = table_.data() + (p * 256 + v) * rw;
        for (size_t w = 0; w < rw; ++w) acc[w] ^= row[w];
    }
    std::memcpy(y, acc, (m_ + 7) / 8);
}

ExtractorState::ExtractorState(ToeplitzSpec spec)
    : spec_(std::move(spec)), kernel_(spec_), buffer_((spec_.n + 7) / 8 + 1, 0) {}

void ExtractorState::feed(const BitStream& input, BitStream& output) {
    const uint32_t n = spec_.n;
    const size_t xbytes = kernel_.input_bytes();
    const size_t ybytes = kernel_.output_bytes();
    uint64_t pos = 0;
    const uint64_t total = input.size_bits();
    bits_in_ += total;

    std::vector<uint8_t> xtmp(xbytes);
    std::vector<uint8_t> ytmp(ybytes);

    // Complete a pending partial block first.
    if (buffer_bits_ > 0) {
        const uint64_t need = n - buffer_bits_;
        const uint64_t take = std::min(need, total);
        BitStream tmp;
        tmp.append_bits(buffer_.data(), 0, buffer_bits_);
        tmp.append_bits(input.data(), 0, take);
        pos = take;
        if (tmp.size_bits() == n) {
            tmp.extract(0, n, xtmp.data());
            kernel_.multiply(xtmp.data(), ytmp.data());
            output.append_bits(ytmp.data(), 0, spec_.m);
            ++blocks_;
            buffer_bits_ = 0;
        } else {
            std::fill(buffer_.begin(), buffer_.end(), 0);
            tmp.extract(0, tmp.size_bits(), buffer_.data());
            buffer_bits_ = tmp.size_bits();
            return;
        }
    }

    const uint64_t nblocks = (total - pos) / n;

    // Whole blocks, chunked: gather inputs, multiply in parallel (every
    // block lands in its own slab slot), then append in input order.
    constexpr uint64_t CHUNK = 4096;
    std::vector<uint8_t> xslab;
    std::vector<uint8_t> yslab;
    for (uint64_t b0 = 0; b0 < nblocks; b0 += CHUNK) {
        const uint64_t b1 = std::min(nblocks, b0 + CHUNK);
        const size_t cnt = static_cast<size_t>(b1 - b0);
        xslab.resize(cnt * xbytes);
        yslab.resize(cnt * ybytes);
        for (size_t b = 0; b < cnt; ++b)
            input.extract(pos + (b0 + b) * n, n, xslab.data() + b * xbytes);
#pragma omp parallel for schedule(static)
        for (int64_t b = 0; b < static_cast<int64_t>(cnt); ++b)
            kernel_.multiply(xslab.data() + static_cast<size_t>(b) * xbytes,
                             yslab.data() + static_cast<size_t>(b) * ybytes);
        for (size_t b = 0; b < cnt; ++b)
            output.append_bits(yslab.data() + b * ybytes, 0, spec_.m);
        blocks_ += cnt;
    }
    pos += nblocks * n;

    const uint64_t rest = total - pos;
    if (rest > 0) {
        std::fill(buffer_.begin(), buffer_.end(), 0);
        BitStream::extract_window(input.data(), pos, rest, buffer_.data());
        buffer_bits_ = rest;
    }
}

BitStream ExtractorState::feed(const BitStream& input) {
    BitStream out;
    feed(input, out);
    return out;
}

uint64_t ExtractorState::finish() {
    const uint64_t discarded = buffer_bits_;
    buffer_bits_ = 0;
    std::fill(buffer_.begin(), buffer_.end(), 0);
    return discarded;
}

ToeplitzSpec seeded_spec_from_file(const std::filesystem::path& p, uint32_t m, uint32_t n) {
    const uint64_t want = static_cast<uint64_t>(m) + n - 1;
    std::error_code ec;
    const auto sz = std::filesystem::file_size(p, ec);
    if (ec) throw IoError("cannot stat seed file: " + p.string());
    if (sz * 8 < want)
        throw IoError("seed file " + p.string() + " holds " + std::to_string(sz * 8) +
                      " bits, need m + n - 1 = " + std::to_string(want));
    BitStream all = BitStream::read_binary(p);
    return build_toeplitz(all.slice(0, want), m, n);
}

ToeplitzSpec seeded_spec_from_prng(uint64_t prng_seed, uint32_t stream, uint32_t m,
                                   uint32_t n) {
    const uint64_t want = static_cast<uint64_t>(m) + n - 1;
    const Philox4x32 prng(prng_seed);
    BitStream seed(want);
    for (uint64_t idx = 0; seed.size_bits() < want; ++idx) {
        const uint64_t w = prng.word64(idx, stream, domain::toeplitz_seed);
        uint8_t be[8];
        for (int i = 0; i < 8; ++i) be[i] = static_cast<uint8_t>(w >> (56 - 8 * i));
        seed.append_bits(be, 0, std::min<uint64_t>(64, want - seed.size_bits()));
    }
    return build_toeplitz(std::move(seed), m, n);
}

} // namespace qrng
