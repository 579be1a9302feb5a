#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qrng {

// Windowed-sinc low-pass FIR. The default meets >= 60 dB rejection at
// 1.5x the cutoff for the rates used here; tap count is configurable.
struct FilterSpec {
    unsigned tap_count = 127;       // odd, >= 31
    double cutoff_hz = 120.0e6;
    double stopband_atten_db = 60.0;
    enum class Window { blackman } window = Window::blackman;

    void validate() const;
};

// Blackman-windowed sinc taps, normalized to unity DC gain.
std::vector<double> design_lowpass(const FilterSpec& spec, double sample_rate_hz);

// |H(f)| of the tap set at one frequency.
double filter_magnitude(std::span<const double> taps, double freq_hz, double sample_rate_hz);
double filter_magnitude_db(std::span<const double> taps, double freq_hz, double sample_rate_hz);

// Sum of squared taps. White noise of variance s^2 filters to s^2 * noise_gain.
double noise_gain(std::span<const double> taps);

// Checks the realized response against spec.stopband_atten_db at
// 1.5x cutoff; throws if the design misses it.
void validate_filter(const FilterSpec& spec, double sample_rate_hz);

} // namespace qrng
