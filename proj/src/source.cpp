#include "qrng/source.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qrng/errors.hpp"
#include "qrng/philox.hpp"

namespace qrng {

namespace {

uint64_t to_integral_hz(double hz, const char* what) {
    const double r = std::round(hz);
    if (!(hz > 0.0) || std::fabs(hz - r) > 1e-3)
        throw std::invalid_argument(std::string(what) + " must be a positive integral Hz value");
    return static_cast<uint64_t>(r);
}

// cos(2*pi*rf*t) evaluated at integer sample indices. When rf/fs is a
// small-denominator rational the carrier repeats with period q and a table
// keeps the mixer exact and cheap; otherwise fall back to live cosines.
class MixerPhase {
public:
    MixerPhase(double rf_hz, double fs_hz) {
        const uint64_t rf = to_integral_hz(rf_hz, "rf_freq");
        const uint64_t fs = to_integral_hz(fs_hz, "internal_rate");
        const uint64_t g = std::gcd(rf, fs);
        q_ = fs / g;
        r_ = rf / g;
        if (q_ <= 65536) {
            table_.resize(q_);
            for (uint64_t j = 0; j < q_; ++j)
                table_[j] = std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                                     static_cast<double>(q_));
        } else {
            ratio_ = rf_hz / fs_hz;
        }
    }

    double operator()(uint64_t index) const {
        if (!table_.empty()) return table_[(r_ * (index % q_)) % q_];
        const double cycles = ratio_ * static_cast<double>(index);
        return std::cos(2.0 * std::numbers::pi * (cycles - std::floor(cycles)));
    }

private:
    uint64_t q_ = 1;
    uint64_t r_ = 0;
    double ratio_ = 0.0;
    std::vector<double> table_;
};

} // namespace

void ChannelSpec::validate() const {
    if (!(center_freq_hz > 0.0))
        throw std::invalid_argument("ChannelSpec: center_freq must be positive");
    if (rf_freq_hz != center_freq_hz)
        throw std::invalid_argument("ChannelSpec: rf_freq must equal center_freq");
    if (!(lpf_cutoff_hz > 0.0))
        throw std::invalid_argument("ChannelSpec: lpf_cutoff must be positive");
    if (std::fabs(f_s_out_hz - 2.0 * lpf_cutoff_hz) > 1e-6 * f_s_out_hz)
        throw std::invalid_argument("ChannelSpec: f_s_out must equal 2 * lpf_cutoff");
    const uint64_t fs_out = to_integral_hz(f_s_out_hz, "f_s_out");
    const uint64_t fs_int = to_integral_hz(internal_rate_hz, "internal_rate");
    if (fs_int % fs_out != 0)
        throw std::invalid_argument("ChannelSpec: internal_rate must be an integer multiple of f_s_out");
    if (!(internal_rate_hz > 2.0 * (center_freq_hz + lpf_cutoff_hz)))
        throw std::invalid_argument("ChannelSpec: internal_rate must exceed 2*(center_freq + lpf_cutoff)");
    if (!(gain > 0.0) || !std::isfinite(gain))
        throw std::invalid_argument("ChannelSpec: gain must be positive");
    filter.validate();
}

uint64_t ChannelSpec::decimation() const {
    return to_integral_hz(internal_rate_hz, "internal_rate") /
           to_integral_hz(f_s_out_hz, "f_s_out");
}

std::vector<double> NoiseTracks::sum() const {
    std::vector<double> s(quantum.size());
    for (size_t i = 0; i < s.size(); ++i) s[i] = quantum[i] + classical[i];
    return s;
}

void GaussianTrackGen::generate(uint64_t start_index, size_t count, double* quantum,
                                double* classical) const {
    const Philox4x32 prng(seed);
    const double sq = model.sigma_q;
    const double se = model.sigma_e;
#pragma omp parallel for schedule(static)
    for (int64_t k = 0; k < static_cast<int64_t>(count); ++k) {
        double z0;
        double z1;
        gaussian_pair(prng.at(start_index + static_cast<uint64_t>(k), stream, domain::noise),
                      z0, z1);
        quantum[k] = sq * z0;
        classical[k] = se * z1;
    }
}

void GaussianTrackGen::generate_sum(uint64_t start_index, size_t count, double* out) const {
    const Philox4x32 prng(seed);
    const double sq = model.sigma_q;
    const double se = model.sigma_e;
#pragma omp parallel for schedule(static)
    for (int64_t k = 0; k < static_cast<int64_t>(count); ++k) {
        double z0;
        double z1;
        gaussian_pair(prng.at(start_index + static_cast<uint64_t>(k), stream, domain::noise),
                      z0, z1);
        out[k] = sq * z0 + se * z1;
    }
}

NoiseTracks synth_wideband(const NoiseModel& model, size_t duration_samples,
                           uint64_t prng_seed, uint32_t stream_id) {
    model.validate();
    if (duration_samples == 0)
        throw std::invalid_argument("synth_wideband: duration_samples must be positive");
    NoiseTracks t;
    t.quantum.resize(duration_samples);
    t.classical.resize(duration_samples);
    GaussianTrackGen gen{model, prng_seed, stream_id};
    gen.generate(0, duration_samples, t.quantum.data(), t.classical.data());
    return t;
}

std::vector<double> downconvert(std::span<const double> samples, const ChannelSpec& spec,
                                std::span<const double> taps) {
    spec.validate();
    const size_t t = taps.size();
    if (samples.size() < t)
        throw std::invalid_argument("downconvert: input shorter than the filter");
    const uint64_t decim = spec.decimation();
    const size_t n_out = (samples.size() - t + 1) / decim;

    const MixerPhase mixer(spec.rf_freq_hz, spec.internal_rate_hz);
    std::vector<double> mixed(samples.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < static_cast<int64_t>(samples.size()); ++i)
        mixed[i] = samples[i] * mixer(static_cast<uint64_t>(i));

    std::vector<double> out(n_out);
    const double g = spec.gain;
#pragma omp parallel for schedule(static)
    for (int64_t o = 0; o < static_cast<int64_t>(n_out); ++o) {
        const double* x = mixed.data() + static_cast<uint64_t>(o) * decim;
        double acc = 0.0;
        for (size_t k = 0; k < t; ++k) acc += taps[k] * x[t - 1 - k];
        out[o] = g * acc;
    }
    return out;
}

RawSampleBlock quantize(std::span<const double> samples, const QuantizerSpec& quant) {
    quant.validate();
    const double r = quant.range_r;
    const double scale = static_cast<double>(quant.code_count()) / (2.0 * r);
    const uint32_t top = quant.code_count() - 1;
    RawSampleBlock blk;
    blk.n_bits = quant.n_bits;
    blk.codes.resize(samples.size());
    uint64_t off_scale = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double v = samples[i];
        if (!std::isfinite(v)) throw std::invalid_argument("quantize: non-finite sample");
        if (v <= -r || v >= r) ++off_scale;
        const double scaled = std::floor((v + r) * scale);
        const uint32_t code =
            scaled <= 0.0 ? 0u
                          : (scaled >= static_cast<double>(top) ? top
                                                                : static_cast<uint32_t>(scaled));
        blk.codes[i] = code;
    }
    blk.off_scale_count = off_scale;
    return blk;
}

RawSampleBlock simulate_channel(const ChannelSpec& spec, const NoiseModel& model,
                                const QuantizerSpec& quant, size_t n_samples,
                                uint64_t prng_seed) {
    spec.validate();
    model.validate();
    quant.validate();
    if (n_samples == 0) throw std::invalid_argument("simulate_channel: n_samples must be positive");

    const auto taps = design_lowpass(spec.filter, spec.internal_rate_hz);
    const size_t t = taps.size();
    const uint64_t decim = spec.decimation();
    const MixerPhase mixer(spec.rf_freq_hz, spec.internal_rate_hz);
    const GaussianTrackGen gen{model, prng_seed, spec.id};

    const double r = quant.range_r;
    const double scale = static_cast<double>(quant.code_count()) / (2.0 * r);
    const uint32_t top = quant.code_count() - 1;

    RawSampleBlock blk;
    blk.codes.resize(n_samples);
    blk.channel_id = spec.id;
    blk.prng_seed = prng_seed;
    blk.n_bits = quant.n_bits;
    blk.f_s_out_hz = to_integral_hz(spec.f_s_out_hz, "f_s_out");

    // Stream in output chunks; the input window for outputs [o0, o1) is
    // [o0*decim, (o1-1)*decim + taps), regenerated per chunk.
    constexpr size_t CHUNK = 1u << 18;
    std::vector<double> window;
    uint64_t off_scale = 0;
    for (size_t o0 = 0; o0 < n_samples; o0 += CHUNK) {
        const size_t o1 = std::min(n_samples, o0 + CHUNK);
        const uint64_t in_start = static_cast<uint64_t>(o0) * decim;
        const size_t in_len = (o1 - 1 - o0) * decim + t;
        window.resize(in_len);
        gen.generate_sum(in_start, in_len, window.data());
#pragma omp parallel for schedule(static)
        for (int64_t j = 0; j < static_cast<int64_t>(in_len); ++j)
            window[j] *= mixer(in_start + static_cast<uint64_t>(j));

        const double g = spec.gain;
#pragma omp parallel for schedule(static) reduction(+ : off_scale)
        for (int64_t o = static_cast<int64_t>(o0); o < static_cast<int64_t>(o1); ++o) {
            const double* x = window.data() + (static_cast<uint64_t>(o) - o0) * decim;
            double acc = 0.0;
            for (size_t k = 0; k < t; ++k) acc += taps[k] * x[t - 1 - k];
            const double v = g * acc;
            if (v <= -r || v >= r) ++off_scale;
            const double scaled = std::floor((v + r) * scale);
            blk.codes[o] = scaled <= 0.0
                               ? 0u
                               : (scaled >= static_cast<double>(top)
                                      ? top
                                      : static_cast<uint32_t>(scaled));
        }
    }
    blk.off_scale_count = off_scale;
    return blk;
}

double chain_sigma_scale(const ChannelSpec& spec, std::span<const double> taps) {
    return spec.gain * std::sqrt(noise_gain(taps) / 2.0);
}

BitStream pack_samples(const RawSampleBlock& block) {
    BitStream bits(static_cast<uint64_t>(block.codes.size()) * block.n_bits);
    if (block.n_bits == 16) {
        // Fast path: two bytes per sample, MSB first.
        std::vector<uint8_t> buf(block.codes.size() * 2);
        for (size_t i = 0; i < block.codes.size(); ++i) {
            buf[2 * i] = static_cast<uint8_t>(block.codes[i] >> 8);
            buf[2 * i + 1] = static_cast<uint8_t>(block.codes[i]);
        }
        bits.append_bits(buf.data(), 0, buf.size() * 8);
    } else {
        for (uint32_t c : block.codes) bits.push_code(c, block.n_bits);
    }
    return bits;
}

namespace {

constexpr char RAW_MAGIC[4] = {'Q', 'R', 'W', '1'};
constexpr uint32_t RAW_VERSION = 1;

template <typename T>
void put_le(std::string& out, T v) {
    for (size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const uint8_t* p) {
    T v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

} // namespace

void write_raw(const std::filesystem::path& p, const RawSampleBlock& block) {
    if (block.n_bits > 16)
        throw IoError("raw file format stores 16-bit codes; n_bits=" +
                      std::to_string(block.n_bits) + " does not fit");
    std::string hdr;
    hdr.append(RAW_MAGIC, 4);
    put_le<uint32_t>(hdr, RAW_VERSION);
    put_le<uint32_t>(hdr, block.n_bits);
    put_le<uint32_t>(hdr, block.channel_id);
    put_le<uint64_t>(hdr, block.f_s_out_hz);
    put_le<uint64_t>(hdr, block.codes.size());
    put_le<uint64_t>(hdr, block.prng_seed);
    put_le<uint64_t>(hdr, block.off_scale_count);

    std::ofstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + p.string());
    f.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
    std::vector<uint8_t> payload(block.codes.size() * 2);
    for (size_t i = 0; i < block.codes.size(); ++i) {
        payload[2 * i] = static_cast<uint8_t>(block.codes[i] & 0xFF);
        payload[2 * i + 1] = static_cast<uint8_t>((block.codes[i] >> 8) & 0xFF);
    }
    f.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
    if (!f) throw IoError("write failed: " + p.string());
}

RawSampleBlock read_raw(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw IoError("cannot open: " + p.string());
    std::vector<uint8_t> hdr(48);
    f.read(reinterpret_cast<char*>(hdr.data()), 48);
    if (f.gcount() != 48)
        throw IoError(p.string() + ": truncated header at offset " +
                      std::to_string(f.gcount()));
    if (std::memcmp(hdr.data(), RAW_MAGIC, 4) != 0)
        throw IoError(p.string() + ": bad magic at offset 0");
    if (get_le<uint32_t>(hdr.data() + 4) != RAW_VERSION)
        throw IoError(p.string() + ": unsupported version at offset 4");
    RawSampleBlock blk;
    blk.n_bits = get_le<uint32_t>(hdr.data() + 8);
    blk.channel_id = get_le<uint32_t>(hdr.data() + 12);
    blk.f_s_out_hz = get_le<uint64_t>(hdr.data() + 16);
    const uint64_t count = get_le<uint64_t>(hdr.data() + 24);
    blk.prng_seed = get_le<uint64_t>(hdr.data() + 32);
    blk.off_scale_count = get_le<uint64_t>(hdr.data() + 40);
    if (blk.n_bits < 2 || blk.n_bits > 16)
        throw IoError(p.string() + ": invalid n_bits at offset 8");

    std::vector<uint8_t> payload(count * 2);
    f.read(reinterpret_cast<char*>(payload.data()),
           static_cast<std::streamsize>(payload.size()));
    if (static_cast<uint64_t>(f.gcount()) != payload.size())
        throw IoError(p.string() + ": truncated payload at offset " +
                      std::to_string(48 + f.gcount()));
    blk.codes.resize(count);
    for (uint64_t i = 0; i < count; ++i)
        blk.codes[i] = static_cast<uint32_t>(payload[2 * i]) |
                       (static_cast<uint32_t>(payload[2 * i + 1]) << 8);
    return blk;
}

} // namespace qrng
