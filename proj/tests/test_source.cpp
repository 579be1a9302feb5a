#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qrng/analysis.hpp"
#include "qrng/dsp.hpp"
#include "qrng/errors.hpp"
#include "qrng/source.hpp"
#include "qrng/special.hpp"

using namespace qrng;

namespace {

ChannelSpec channel_one() {
    ChannelSpec c;
    c.id = 1;
    c.center_freq_hz = 200e6;
    c.rf_freq_hz = 200e6;
    c.lpf_cutoff_hz = 120e6;
    c.f_s_out_hz = 240e6;
    c.internal_rate_hz = 2.4e9;
    c.gain = 1.0;
    return c;
}

double variance(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

} // namespace

TEST_CASE("filter design meets the stopband contract") {
    FilterSpec spec;
    const auto taps = design_lowpass(spec, 2.4e9);
    REQUIRE(taps.size() == 127);
    CHECK(filter_magnitude(taps, 0.0, 2.4e9) == doctest::Approx(1.0));
    CHECK(filter_magnitude_db(taps, 180e6, 2.4e9) < -60.0);
    CHECK(filter_magnitude_db(taps, 200e6, 2.4e9) < -60.0);
    CHECK_NOTHROW(validate_filter(spec, 2.4e9));
    FilterSpec bad;
    bad.tap_count = 31; // far too short for 60 dB at 1.5x cutoff here
    CHECK_THROWS(validate_filter(bad, 2.4e9));
    FilterSpec even;
    even.tap_count = 128;
    CHECK_THROWS(design_lowpass(even, 2.4e9));
}

TEST_CASE("wideband synthesis: moments, determinism, separable tracks") {
    NoiseModel m{1.0, 0.5};
    const size_t n = 1000000;
    const NoiseTracks t = synth_wideband(m, n, 0xAA55, 1);
    const auto total = t.sum();

    double mean = 0.0;
    for (double x : total) mean += x;
    mean /= static_cast<double>(total.size());
    const double sigma_total = m.sigma_total();
    CHECK(std::fabs(mean) < 5.0 * sigma_total / 1000.0);

    CHECK(variance(total) == doctest::Approx(sigma_total * sigma_total).epsilon(0.05));
    CHECK(variance(t.quantum) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(variance(t.classical) == doctest::Approx(0.25).epsilon(0.05));

    const NoiseTracks t2 = synth_wideband(m, n, 0xAA55, 1);
    CHECK(t.quantum == t2.quantum);
    CHECK(t.classical == t2.classical);
    const NoiseTracks t3 = synth_wideband(m, n, 0xAA56, 1);
    CHECK(t.quantum != t3.quantum);
}

TEST_CASE("downconversion shifts an in-band tone to baseband at half amplitude") {
    const ChannelSpec spec = channel_one();
    const auto taps = design_lowpass(spec.filter, spec.internal_rate_hz);
    const size_t n_out = 4800; // integer number of 50 MHz cycles at 240 MS/s
    const size_t n_in = n_out * 10 + taps.size() - 1;
    const double amp = 0.8;
    std::vector<double> tone(n_in);
    for (size_t i = 0; i < n_in; ++i)
        tone[i] = amp * std::cos(2.0 * std::numbers::pi * 250e6 * static_cast<double>(i) / 2.4e9);

    const auto base = downconvert(tone, spec, taps);
    REQUIRE(base.size() == n_out);
    double power = 0.0;
    for (double x : base) power += x * x;
    const double rms_amp = std::sqrt(2.0 * power / static_cast<double>(n_out));
    CHECK(rms_amp == doctest::Approx(amp / 2.0).epsilon(0.01));
}

TEST_CASE("downconversion rejects a tone beyond the cutoff by 60 dB") {
    const ChannelSpec spec = channel_one();
    const auto taps = design_lowpass(spec.filter, spec.internal_rate_hz);
    const size_t n_out = 4800;
    const size_t n_in = n_out * 10 + taps.size() - 1;
    const double amp = 0.8;
    std::vector<double> tone(n_in);
    for (size_t i = 0; i < n_in; ++i)
        tone[i] = amp * std::cos(2.0 * std::numbers::pi * 400e6 * static_cast<double>(i) / 2.4e9);

    const auto base = downconvert(tone, spec, taps);
    double power = 0.0;
    for (double x : base) power += x * x;
    power /= static_cast<double>(n_out);
    const double passband_power = (amp / 2.0) * (amp / 2.0) / 2.0;
    CHECK(power < passband_power * 1e-6);
}

TEST_CASE("white noise filters to the predicted variance") {
    const ChannelSpec spec = channel_one();
    const auto taps = design_lowpass(spec.filter, spec.internal_rate_hz);
    NoiseModel m{1.0, 0.0};
    const size_t n_out = 500000;
    const size_t n_in = n_out * 10 + taps.size() - 1;
    const auto tracks = synth_wideband(m, n_in, 0xBEEF, 1);
    const auto base = downconvert(tracks.quantum, spec, taps);
    // mixing halves white-noise power; the filter then passes noise_gain
    const double predicted = noise_gain(taps) / 2.0;
    CHECK(variance(base) == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("downconvert input shorter than the filter is rejected") {
    const ChannelSpec spec = channel_one();
    const auto taps = design_lowpass(spec.filter, spec.internal_rate_hz);
    std::vector<double> tiny(taps.size() - 1, 0.0);
    CHECK_THROWS(downconvert(tiny, spec, taps));
}

TEST_CASE("quantizer codes, boundaries and off-scale accounting") {
    QuantizerSpec q{16, 1.0};
    const double vals[] = {0.0, 1.0, -1.0, 0.5, -0.25, 2.0, -3.0};
    const auto blk = quantize(vals, q);
    CHECK(blk.codes[0] == 32768);
    CHECK(blk.codes[1] == 65535);
    CHECK(blk.codes[2] == 0);
    CHECK(blk.codes[3] == 49152);
    CHECK(blk.codes[4] == 24576);
    CHECK(blk.codes[5] == 65535);
    CHECK(blk.codes[6] == 0);
    CHECK(blk.off_scale_count == 4); // +-1.0 and the two saturated values

    const double bad[] = {std::nan("")};
    CHECK_THROWS(quantize(bad, q));
}

TEST_CASE("quantizer is monotone") {
    QuantizerSpec q{8, 2.0};
    std::vector<double> v;
    for (int i = 0; i < 2000; ++i) v.push_back(-3.0 + 6.0 * i / 1999.0);
    const auto blk = quantize(v, q);
    for (size_t i = 1; i < blk.codes.size(); ++i) CHECK(blk.codes[i] >= blk.codes[i - 1]);
}

TEST_CASE("gaussian off-scale fraction follows the tail oracle") {
    NoiseModel m{1.0, 0.5};
    const double sigma_total = m.sigma_total();
    QuantizerSpec q{16, 4.0 * sigma_total};
    const size_t n = 2000000;
    const auto tracks = synth_wideband(m, n, 0xF00D, 1);
    const auto blk = quantize(tracks.sum(), q);
    const double p = 2.0 * normal_cdf(-4.0);
    const double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    const double frac = static_cast<double>(blk.off_scale_count) / static_cast<double>(n);
    CHECK(std::fabs(frac - p) <= 3.0 * sd);
}

TEST_CASE("simulate_channel equals the composed stages exactly") {
    ChannelSpec spec = channel_one();
    NoiseModel m{1.0, 0.1};
    QuantizerSpec q{16, 1.0};
    const size_t n_samples = 20000;
    const auto blk = simulate_channel(spec, m, q, n_samples, 0xC0FFEE);

    const auto taps = design_lowpass(spec.filter, spec.internal_rate_hz);
    const size_t n_in = n_samples * spec.decimation() + taps.size() - 1;
    const auto tracks = synth_wideband(m, n_in, 0xC0FFEE, spec.id);
    const auto base = downconvert(tracks.sum(), spec, taps);
    const auto ref = quantize(base, q);

    REQUIRE(blk.codes.size() == n_samples);
    REQUIRE(ref.codes.size() == n_samples);
    CHECK(blk.codes == ref.codes);
    CHECK(blk.off_scale_count == ref.off_scale_count);
}

TEST_CASE("simulate_channel is byte-for-byte deterministic") {
    ChannelSpec spec = channel_one();
    NoiseModel m{1.0, 0.1};
    QuantizerSpec q{16, 1.0};
    const auto a = simulate_channel(spec, m, q, 50000, 7);
    const auto b = simulate_channel(spec, m, q, 50000, 7);
    CHECK(a.codes == b.codes);
    CHECK(a.off_scale_count == b.off_scale_count);
    const auto c = simulate_channel(spec, m, q, 50000, 8);
    CHECK(a.codes != c.codes);
}

TEST_CASE("silent input collapses to the central codes") {
    ChannelSpec spec = channel_one();
    NoiseModel m{1e-30, 0.0};
    QuantizerSpec q{16, 1.0};
    const auto blk = simulate_channel(spec, m, q, 5000, 3);
    for (uint32_t code : blk.codes) {
        CHECK(code >= 32767);
        CHECK(code <= 32768);
    }
}

TEST_CASE("distinct seeds give uncorrelated channels") {
    ChannelSpec s1 = channel_one();
    ChannelSpec s2 = channel_one();
    s2.id = 2;
    s2.center_freq_hz = 600e6;
    s2.rf_freq_hz = 600e6;
    NoiseModel m{1.0, 0.1};
    QuantizerSpec q{16, 1.0};
    const size_t n = 2000000;
    const auto a = simulate_channel(s1, m, q, n, 101);
    const auto b = simulate_channel(s2, m, q, n, 202);

    double ma = 0.0;
    double mb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        ma += a.codes[i];
        mb += b.codes[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a.codes[i] - ma;
        const double db = b.codes[i] - mb;
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    const double rho = std::fabs(sxy / std::sqrt(sxx * syy));
    CHECK(rho < 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("simulated code distribution matches the model's max mass") {
    // A 4-bit quantizer keeps the maximal-mass code unambiguous, so the
    // empirical maximum is binomial around the model value.
    ChannelSpec spec = channel_one();
    NoiseModel m{1.0, 0.1};
    const auto taps = design_lowpass(spec.filter, spec.internal_rate_hz);
    const double scale = chain_sigma_scale(spec, taps);
    QuantizerSpec q{4, 4.0 * scale * m.sigma_total()};
    const size_t n = 1000000;
    const auto blk = simulate_channel(spec, m, q, n, 0xABCDE);

    NoiseModel post{m.sigma_q * scale, m.sigma_e * scale};
    const double p_model = std::exp2(-estimate_min_entropy(post, q, 0.0).h_min);

    const auto hist = code_histogram(blk.codes, q.n_bits);
    uint64_t max_count = 0;
    for (uint64_t c : hist.counts) max_count = std::max(max_count, c);
    const double p_emp = static_cast<double>(max_count) / static_cast<double>(n);
    const double sd = std::sqrt(p_model * (1.0 - p_model) / static_cast<double>(n));
    CHECK(std::fabs(p_emp - p_model) <= 3.0 * sd);
}

TEST_CASE("raw block files round-trip and reject corruption") {
    const auto dir = std::filesystem::temp_directory_path() / "qrng_raw_test";
    std::filesystem::create_directories(dir);
    RawSampleBlock blk;
    blk.codes = {0, 1, 65535, 32768, 12345};
    blk.off_scale_count = 2;
    blk.channel_id = 3;
    blk.prng_seed = 0xDEAD;
    blk.n_bits = 16;
    blk.f_s_out_hz = 240000000;
    const auto path = dir / "blk.raw";
    write_raw(path, blk);
    const auto rd = read_raw(path);
    CHECK(rd.codes == blk.codes);
    CHECK(rd.off_scale_count == blk.off_scale_count);
    CHECK(rd.channel_id == blk.channel_id);
    CHECK(rd.prng_seed == blk.prng_seed);
    CHECK(rd.f_s_out_hz == blk.f_s_out_hz);

    // magic corruption reports the offset
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.put('X');
    f.close();
    CHECK_THROWS_WITH_AS(read_raw(path), doctest::Contains("offset 0"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("sample packing is MSB-first in time order") {
    RawSampleBlock blk;
    blk.codes = {0xABCD, 0x0102};
    blk.n_bits = 16;
    const BitStream bits = pack_samples(blk);
    REQUIRE(bits.size_bits() == 32);
    CHECK(bits.data()[0] == 0xAB);
    CHECK(bits.data()[1] == 0xCD);
    CHECK(bits.data()[2] == 0x01);
    CHECK(bits.data()[3] == 0x02);

    RawSampleBlock odd;
    odd.codes = {0b1011, 0b0001};
    odd.n_bits = 4;
    const BitStream ob = pack_samples(odd);
    REQUIRE(ob.size_bits() == 8);
    CHECK(ob.data()[0] == 0b10110001);
}
