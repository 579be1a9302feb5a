#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qrng/bitstream.hpp"
#include "qrng/dsp.hpp"
#include "qrng/entropy.hpp"

namespace qrng {

// One sideband channel's front end: mix down at rf_freq, low-pass, decimate
// to f_s_out, scale by the per-path amplifier gain.
struct ChannelSpec {
    uint32_t id = 1;
    double center_freq_hz = 200.0e6;
    double rf_freq_hz = 200.0e6;    // equal to center_freq
    double lpf_cutoff_hz = 120.0e6;
    double f_s_out_hz = 240.0e6;    // = 2 * lpf_cutoff
    double internal_rate_hz = 2.4e9; // integer multiple of f_s_out
    double gain = 1.0;
    FilterSpec filter;

    void validate() const;
    uint64_t decimation() const; // internal_rate / f_s_out
};

// Gaussian source samples split into addable quantum and classical tracks
// so each can be histogrammed separately.
struct NoiseTracks {
    std::vector<double> quantum;
    std::vector<double> classical;

    std::vector<double> sum() const;
};

// Independent zero-mean Gaussian samples at the internal rate; variance
// sigma_q^2 + sigma_e^2 for the summed tracks. Deterministic in
// (seed, stream): sample i depends only on its index.
NoiseTracks synth_wideband(const NoiseModel& model, size_t duration_samples,
                           uint64_t prng_seed, uint32_t stream_id);

// Random-access generator behind synth_wideband; used by the streaming
// channel simulation to regenerate arbitrary index windows.
struct GaussianTrackGen {
    NoiseModel model;
    uint64_t seed = 0;
    uint32_t stream = 0;

    void generate(uint64_t start_index, size_t count, double* quantum,
                  double* classical) const;
    void generate_sum(uint64_t start_index, size_t count, double* out) const;
};

// Multiply by cos(2*pi*rf*t), FIR low-pass, decimate, apply gain.
// Output length = floor((input - tap_count + 1) / decimation).
std::vector<double> downconvert(std::span<const double> samples, const ChannelSpec& spec,
                                std::span<const double> taps);

// Quantized output block of one channel.
struct RawSampleBlock {
    std::vector<uint32_t> codes;
    uint64_t off_scale_count = 0;
    uint32_t channel_id = 0;
    uint64_t prng_seed = 0;
    unsigned n_bits = 16;
    uint64_t f_s_out_hz = 0;
};

// code = clamp(floor((v + R) / 2R * 2^n), 0, 2^n - 1); samples at or beyond
// +-R count as off-scale. Throws on non-finite input.
RawSampleBlock quantize(std::span<const double> samples, const QuantizerSpec& quant);

// synth -> downconvert -> quantize, streamed in chunks, producing exactly
// n_samples codes. Byte-for-byte deterministic in (specs, seed).
RawSampleBlock simulate_channel(const ChannelSpec& spec, const NoiseModel& model,
                                const QuantizerSpec& quant, size_t n_samples,
                                uint64_t prng_seed);

// Std of the downconverted track per unit source std: gain * sqrt(noise_gain/2).
double chain_sigma_scale(const ChannelSpec& spec, std::span<const double> taps);

// Pack codes into a bit stream, n_bits per sample MSB-first, time order.
BitStream pack_samples(const RawSampleBlock& block);

// Raw block file: little-endian header + u16 codes (see docs/formats.md).
void write_raw(const std::filesystem::path& p, const RawSampleBlock& block);
RawSampleBlock read_raw(const std::filesystem::path& p);

} // namespace qrng
