#include "qrng/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qrng {

void FilterSpec::validate() const {
    if (tap_count < 31 || tap_count % 2 == 0)
        throw std::invalid_argument("FilterSpec: tap_count must be odd and >= 31");
    if (!(cutoff_hz > 0.0))
        throw std::invalid_argument("FilterSpec: cutoff must be positive");
    if (!(stopband_atten_db > 0.0))
        throw std::invalid_argument("FilterSpec: stopband attenuation must be positive");
}

std::vector<double> design_lowpass(const FilterSpec& spec, double sample_rate_hz) {
    spec.validate();
    if (!(sample_rate_hz > 2.0 * spec.cutoff_hz))
        throw std::invalid_argument("design_lowpass: sample rate below Nyquist for cutoff");

    const unsigned n = spec.tap_count;
    const double fc = spec.cutoff_hz / sample_rate_hz; // cycles per sample
    const int mid = static_cast<int>(n / 2);
    std::vector<double> h(n);
    double sum = 0.0;
    for (unsigned k = 0; k < n; ++k) {
        const int off = static_cast<int>(k) - mid;
        const double x = 2.0 * fc * off;
        const double sinc = off == 0 ? 1.0
                                     : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double w = 0.42 -
                         0.5 * std::cos(2.0 * std::numbers::pi * k / (n - 1)) +
                         0.08 * std::cos(4.0 * std::numbers::pi * k / (n - 1));
        h[k] = 2.0 * fc * sinc * w;
        sum += h[k];
    }
    for (double& v : h) v /= sum; // unity DC gain
    return h;
}

double filter_magnitude(std::span<const double> taps, double freq_hz, double sample_rate_hz) {
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
    double re = 0.0;
    double im = 0.0;
    for (size_t k = 0; k < taps.size(); ++k) {
        re += taps[k] * std::cos(w * static_cast<double>(k));
        im -= taps[k] * std::sin(w * static_cast<double>(k));
    }
    return std::hypot(re, im);
}

double filter_magnitude_db(std::span<const double> taps, double freq_hz,
                           double sample_rate_hz) {
    return 20.0 * std::log10(filter_magnitude(taps, freq_hz, sample_rate_hz));
}

double noise_gain(std::span<const double> taps) {
    double s = 0.0;
    for (double t : taps) s += t * t;
    return s;
}

void validate_filter(const FilterSpec& spec, double sample_rate_hz) {
    const auto taps = design_lowpass(spec, sample_rate_hz);
    const double edge = 1.5 * spec.cutoff_hz;
    // Worst case over the stopband from the 1.5x-cutoff edge to Nyquist.
    double worst_db = -1e9;
    const double nyquist = sample_rate_hz / 2.0;
    const int steps = 512;
    for (int i = 0; i <= steps; ++i) {
        const double f = edge + (nyquist - edge) * i / steps;
        worst_db = std::max(worst_db, filter_magnitude_db(taps, f, sample_rate_hz));
    }
    if (worst_db > -spec.stopband_atten_db)
        throw std::invalid_argument("FilterSpec: realized stopband attenuation " +
                                    std::to_string(-worst_db) + " dB at >= 1.5x cutoff misses the " +
                                    std::to_string(spec.stopband_atten_db) + " dB target");
}

} // namespace qrng
