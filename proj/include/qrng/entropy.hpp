#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qrng {

// Quantum/classical noise standard deviations of one sub-entropy source, volts.
struct NoiseModel {
    double sigma_q = 1.0; // vacuum (quantum) noise, > 0
    double sigma_e = 0.0; // electronic (classical) noise, >= 0

    void validate() const;
    double sigma_total() const;
};

// Quantum-to-classical noise ratio, dB. Returns +infinity when sigma_e == 0.
double qcnr_db(const NoiseModel& model);

// ADC with symmetric input range [-R, +R] and offset-binary codes.
struct QuantizerSpec {
    unsigned n_bits = 16; // 2..24
    double range_r = 1.0; // volts, > 0

    void validate() const;
    uint32_t code_count() const { return 1u << n_bits; }
    double bin_width() const { return 2.0 * range_r / static_cast<double>(code_count()); }
};

struct EntropyEstimate {
    double h_min = 0.0;           // conditional min-entropy, bits per sample
    double worst_case_shift = 0.0; // classical-noise excursion used, volts
};

// Worst-case conditional min-entropy of the quantized sample. The sample
// given the adversary's classical-noise value is modeled as Gaussian with
// std sigma_q and mean shifted by +-k_sigma*sigma_e; interior code masses
// are Gaussian CDF differences, the two edge codes absorb the off-scale
// tails. h_min = -log2(max code mass), minimized over the two shifts.
EntropyEstimate estimate_min_entropy(const NoiseModel& model, const QuantizerSpec& quant,
                                     double k_sigma);

// Grid search for the conversion range maximizing h_min; ties go to the
// smaller range.
std::pair<double, EntropyEstimate> optimize_range(const NoiseModel& model,
                                                  const QuantizerSpec& quant_template,
                                                  std::span<const double> r_grid,
                                                  double k_sigma);

// Leftover-hash-lemma extractor sizing for one Toeplitz block.
struct ExtractionPlan {
    uint32_t n_in = 0;             // input block length, bits
    uint32_t n_out = 0;            // output block length, bits
    uint32_t samples_per_block = 0; // N = n_in / n_bits
    double epsilon = 0.0;          // hash security parameter
    uint64_t seed_len = 0;         // n_in + n_out - 1
    double ratio = 0.0;            // n_out / n_in
};

// n_out = floor(N*h_min - log2(1/eps^2)). Throws with the entropy deficit
// spelled out when the budget is not positive.
ExtractionPlan plan_extraction(double h_min, uint32_t n_in, unsigned n_bits, double epsilon);

// Eq.-style rate bookkeeping for one channel.
struct RateModel {
    double w_bw = 0.0;           // sideband mode bandwidth, Hz
    double f_s = 0.0;            // ADC sample rate, Hz (= 2*w_bw)
    double c_max = 0.0;          // maximum extractable rate, bits/s
    double real_time_rate = 0.0; // planned output rate, bits/s
};

// C_max = (h_min/n) * n * 2*W_bw = h_min * 2*W_bw.
double max_rate(double h_min, const QuantizerSpec& quant, double w_bw);

// f_s * n_bits * (n_out / n_in), bits/s.
double real_time_rate(double f_s, unsigned n_bits, const ExtractionPlan& plan);

RateModel make_rate_model(double h_min, const QuantizerSpec& quant, double w_bw,
                          const ExtractionPlan& plan);

// Exact presentation rounding: bits/s -> hundredths of Gbps, half away from
// zero, computed in integer arithmetic so table values and their sums are
// reproducible. f_s_hz and the plan dimensions must be exact integers.
int64_t rate_gbps_hundredths(uint64_t f_s_hz, unsigned n_bits, const ExtractionPlan& plan);
std::string format_gbps(int64_t hundredths);

} // namespace qrng
