#include "qrng/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qrng/special.hpp"

namespace qrng {

void NoiseModel::validate() const {
    if (!(sigma_q > 0.0) || !std::isfinite(sigma_q))
        throw std::invalid_argument("NoiseModel: sigma_q must be positive");
    if (!(sigma_e >= 0.0) || !std::isfinite(sigma_e))
        throw std::invalid_argument("NoiseModel: sigma_e must be non-negative");
}

double NoiseModel::sigma_total() const {
    return std::sqrt(sigma_q * sigma_q + sigma_e * sigma_e);
}

double qcnr_db(const NoiseModel& model) {
    model.validate();
    if (model.sigma_e == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10((model.sigma_q * model.sigma_q) /
                             (model.sigma_e * model.sigma_e));
}

void QuantizerSpec::validate() const {
    if (n_bits < 2 || n_bits > 24)
        throw std::invalid_argument("QuantizerSpec: n_bits must be in [2, 24]");
    if (!(range_r > 0.0) || !std::isfinite(range_r))
        throw std::invalid_argument("QuantizerSpec: range_r must be positive");
    if (!(bin_width() > 0.0))
        throw std::invalid_argument("QuantizerSpec: degenerate bin width");
}

namespace {

// Largest single-code mass for a Gaussian(mean, sigma) against the quantizer.
// Interior bins by CDF differences, edge codes absorb the clipped tails.
double max_code_mass(const QuantizerSpec& q, double mean, double sigma) {
    const uint32_t codes = q.code_count();
    const double r = q.range_r;
    const double delta = q.bin_width();
    double p_max = 0.0;
    double prev = normal_cdf((-r + delta - mean) / sigma);
    p_max = prev; // code 0: everything below -R + delta
    for (uint32_t i = 1; i + 1 < codes; ++i) {
        const double edge = -r + delta * static_cast<double>(i + 1);
        const double cur = normal_cdf((edge - mean) / sigma);
        p_max = std::max(p_max, cur - prev);
        prev = cur;
    }
    p_max = std::max(p_max, 1.0 - prev); // top code absorbs the upper tail
    return p_max;
}

} // namespace

EntropyEstimate estimate_min_entropy(const NoiseModel& model, const QuantizerSpec& quant,
                                     double k_sigma) {
    model.validate();
    quant.validate();
    if (!(k_sigma >= 0.0)) throw std::invalid_argument("estimate_min_entropy: k_sigma >= 0");

    const double shift = k_sigma * model.sigma_e;
    const double p_max = std::max(max_code_mass(quant, shift, model.sigma_q),
                                  max_code_mass(quant, -shift, model.sigma_q));
    const double h = -std::log2(p_max);
    if (!std::isfinite(h)) throw std::runtime_error("estimate_min_entropy: non-finite result");
    return {h, shift};
}

std::pair<double, EntropyEstimate> optimize_range(const NoiseModel& model,
                                                  const QuantizerSpec& quant_template,
                                                  std::span<const double> r_grid,
                                                  double k_sigma) {
    if (r_grid.empty()) throw std::invalid_argument("optimize_range: empty range grid");
    std::vector<double> grid(r_grid.begin(), r_grid.end());
    std::sort(grid.begin(), grid.end());
    double best_r = 0.0;
    EntropyEstimate best{-1.0, 0.0};
    for (double r : grid) {
        if (!(r > 0.0)) throw std::invalid_argument("optimize_range: ranges must be positive");
        QuantizerSpec q = quant_template;
        q.range_r = r;
        const EntropyEstimate est = estimate_min_entropy(model, q, k_sigma);
        if (est.h_min > best.h_min) { // strict: ties keep the smaller range
            best = est;
            best_r = r;
        }
    }
    return {best_r, best};
}

ExtractionPlan plan_extraction(double h_min, uint32_t n_in, unsigned n_bits, double epsilon) {
    if (!(h_min > 0.0) || h_min > static_cast<double>(n_bits))
        throw std::invalid_argument("plan_extraction: need 0 < h_min <= n_bits");
    if (n_in == 0 || n_in % n_bits != 0)
        throw std::invalid_argument("plan_extraction: n_in must be a positive multiple of n_bits");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("plan_extraction: epsilon must be in (0, 1)");

    const uint32_t samples = n_in / n_bits;
    const double penalty = -2.0 * std::log2(epsilon); // log2(1/eps^2)
    const double budget = static_cast<double>(samples) * h_min - penalty;
    if (!(budget >= 1.0)) {
        throw std::invalid_argument(
            "plan_extraction: entropy budget " + std::to_string(budget) +
            " bits per block is below 1 (block supplies " +
            std::to_string(static_cast<double>(samples) * h_min) + " bits, hash penalty " +
            std::to_string(penalty) + "); enlarge the block or raise h_min");
    }
    ExtractionPlan plan;
    plan.n_in = n_in;
    plan.n_out = static_cast<uint32_t>(std::floor(budget));
    plan.samples_per_block = samples;
    plan.epsilon = epsilon;
    plan.seed_len = static_cast<uint64_t>(n_in) + plan.n_out - 1;
    plan.ratio = static_cast<double>(plan.n_out) / static_cast<double>(n_in);
    return plan;
}

double max_rate(double h_min, const QuantizerSpec& quant, double w_bw) {
    quant.validate();
    if (!(w_bw > 0.0)) throw std::invalid_argument("max_rate: w_bw must be positive");
    if (!(h_min >= 0.0) || h_min > static_cast<double>(quant.n_bits))
        throw std::invalid_argument("max_rate: need 0 <= h_min <= n_bits");
    const double p_h = h_min / static_cast<double>(quant.n_bits);
    return p_h * static_cast<double>(quant.n_bits) * 2.0 * w_bw;
}

double real_time_rate(double f_s, unsigned n_bits, const ExtractionPlan& plan) {
    if (!(f_s > 0.0)) throw std::invalid_argument("real_time_rate: f_s must be positive");
    return f_s * static_cast<double>(n_bits) * plan.ratio;
}

RateModel make_rate_model(double h_min, const QuantizerSpec& quant, double w_bw,
                          const ExtractionPlan& plan) {
    RateModel rm;
    rm.w_bw = w_bw;
    rm.f_s = 2.0 * w_bw;
    rm.c_max = max_rate(h_min, quant, w_bw);
    rm.real_time_rate = real_time_rate(rm.f_s, quant.n_bits, plan);
    if (rm.real_time_rate > rm.f_s * static_cast<double>(quant.n_bits) * (1.0 + 1e-12))
        throw std::runtime_error("RateModel: real_time_rate exceeds f_s * n_bits");
    return rm;
}

int64_t rate_gbps_hundredths(uint64_t f_s_hz, unsigned n_bits, const ExtractionPlan& plan) {
    // rate = f_s * n_bits * n_out / n_in bits/s; hundredths of Gbps =
    // round(rate * 100 / 1e9), exact in 128-bit integer arithmetic.
    const __int128 num = static_cast<__int128>(f_s_hz) * n_bits * plan.n_out * 100;
    const __int128 den = static_cast<__int128>(plan.n_in) * 1000000000ull;
    return static_cast<int64_t>((2 * num + den) / (2 * den)); // half away from zero (positive)
}

std::string format_gbps(int64_t hundredths) {
    const int64_t whole = hundredths / 100;
    const int64_t frac = hundredths % 100;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%02lld", static_cast<long long>(whole),
                  static_cast<long long>(frac));
    return buf;
}

} // namespace qrng
