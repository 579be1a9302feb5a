#include "qrng/sts.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "qrng/special.hpp"

namespace qrng {

uint32_t StsParams::resolved_block_frequency_m(uint64_t block_len) const {
    if (block_frequency_m != 0) return block_frequency_m;
    return static_cast<uint32_t>(std::max<uint64_t>(20, block_len / 100));
}

double sts_monobit(const uint8_t* bits, size_t n) {
    int64_t s = 0;
    for (size_t i = 0; i < n; ++i) s += bits[i] ? 1 : -1;
    const double s_obs = std::fabs(static_cast<double>(s)) / std::sqrt(static_cast<double>(n));
    return std::erfc(s_obs / std::sqrt(2.0));
}

double sts_block_frequency(const uint8_t* bits, size_t n, uint32_t m) {
    if (m == 0) throw std::invalid_argument("block_frequency: m must be positive");
    const size_t blocks = n / m;
    if (blocks == 0) throw std::invalid_argument("block_frequency: block longer than input");
    double chi2 = 0.0;
    for (size_t b = 0; b < blocks; ++b) {
        uint64_t ones = 0;
        for (size_t i = 0; i < m; ++i) ones += bits[b * m + i];
        const double pi = static_cast<double>(ones) / m;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * m;
    return igamc(static_cast<double>(blocks) / 2.0, chi2 / 2.0);
}

double sts_runs(const uint8_t* bits, size_t n) {
    uint64_t ones = 0;
    for (size_t i = 0; i < n; ++i) ones += bits[i];
    const double pi = static_cast<double>(ones) / static_cast<double>(n);
    if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n))) return 0.0;
    uint64_t v = 1;
    for (size_t i = 1; i < n; ++i) v += bits[i] != bits[i - 1];
    const double nn = static_cast<double>(n);
    const double num = std::fabs(static_cast<double>(v) - 2.0 * nn * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * nn) * pi * (1.0 - pi);
    return std::erfc(num / den);
}

double sts_longest_run(const uint8_t* bits, size_t n) {
    size_t m;
    std::vector<double> pi;
    std::vector<uint32_t> v_edges; // category boundaries on the longest run
    if (n < 128) throw std::invalid_argument("longest_run: need n >= 128");
    if (n < 6272) {
        m = 8;
        v_edges = {1, 2, 3, 4};
        pi = {0.2148, 0.3672, 0.2305, 0.1875};
    } else if (n < 750000) {
        m = 128;
        v_edges = {4, 5, 6, 7, 8, 9};
        pi = {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124};
    } else {
        m = 10000;
        v_edges = {10, 11, 12, 13, 14, 15, 16};
        pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
    }
    const size_t blocks = n / m;
    const size_t k = pi.size() - 1;
    std::vector<uint64_t> nu(pi.size(), 0);
    for (size_t b = 0; b < blocks; ++b) {
        uint32_t longest = 0;
        uint32_t run = 0;
        for (size_t i = 0; i < m; ++i) {
            if (bits[b * m + i]) {
                ++run;
                longest = std::max(longest, run);
            } else {
                run = 0;
            }
        }
        size_t cat = 0;
        while (cat < k && longest > v_edges[cat]) ++cat;
        ++nu[cat];
    }
    double chi2 = 0.0;
    for (size_t c = 0; c < pi.size(); ++c) {
        const double expected = static_cast<double>(blocks) * pi[c];
        const double d = static_cast<double>(nu[c]) - expected;
        chi2 += d * d / expected;
    }
    return igamc(static_cast<double>(k) / 2.0, chi2 / 2.0);
}

namespace {

double cusum_pvalue(double z, double n) {
    const double sn = std::sqrt(n);
    double sum1 = 0.0;
    {
        const int lo = static_cast<int>(std::floor((-n / z + 1.0) / 4.0));
        const int hi = static_cast<int>(std::floor((n / z - 1.0) / 4.0));
        for (int k = lo; k <= hi; ++k) {
            sum1 += normal_cdf((4.0 * k + 1.0) * z / sn) -
                    normal_cdf((4.0 * k - 1.0) * z / sn);
        }
    }
    double sum2 = 0.0;
    {
        const int lo = static_cast<int>(std::floor((-n / z - 3.0) / 4.0));
        const int hi = static_cast<int>(std::floor((n / z - 1.0) / 4.0));
        for (int k = lo; k <= hi; ++k) {
            sum2 += normal_cdf((4.0 * k + 3.0) * z / sn) -
                    normal_cdf((4.0 * k + 1.0) * z / sn);
        }
    }
    return 1.0 - sum1 + sum2;
}

} // namespace

std::pair<double, double> sts_cumulative_sums(const uint8_t* bits, size_t n) {
    int64_t s = 0;
    int64_t max_fwd = 0;
    for (size_t i = 0; i < n; ++i) {
        s += bits[i] ? 1 : -1;
        max_fwd = std::max<int64_t>(max_fwd, s < 0 ? -s : s);
    }
    int64_t sr = 0;
    int64_t max_rev = 0;
    for (size_t i = n; i-- > 0;) {
        sr += bits[i] ? 1 : -1;
        max_rev = std::max<int64_t>(max_rev, sr < 0 ? -sr : sr);
    }
    const double nn = static_cast<double>(n);
    return {cusum_pvalue(static_cast<double>(max_fwd), nn),
            cusum_pvalue(static_cast<double>(max_rev), nn)};
}

namespace {

// psi^2_m over overlapping m-bit patterns with wraparound.
double psi_squared(const uint8_t* bits, size_t n, uint32_t m) {
    if (m == 0) return 0.0;
    std::vector<uint64_t> counts(1ull << m, 0);
    const uint32_t mask = static_cast<uint32_t>((1ull << m) - 1);
    uint32_t window = 0;
    for (uint32_t i = 0; i < m - 1; ++i) window = (window << 1) | bits[i];
    for (size_t i = 0; i < n; ++i) {
        const uint8_t next = bits[(i + m - 1) % n];
        window = ((window << 1) | next) & mask;
        ++counts[window];
    }
    double sum = 0.0;
    for (uint64_t c : counts) sum += static_cast<double>(c) * static_cast<double>(c);
    const double nn = static_cast<double>(n);
    return sum * static_cast<double>(1ull << m) / nn - nn;
}

} // namespace

std::pair<double, double> sts_serial(const uint8_t* bits, size_t n, uint32_t m) {
    if (m < 3) throw std::invalid_argument("serial: m must be >= 3");
    const double psi_m = psi_squared(bits, n, m);
    const double psi_m1 = psi_squared(bits, n, m - 1);
    const double psi_m2 = psi_squared(bits, n, m - 2);
    const double d1 = std::max(psi_m - psi_m1, 0.0);
    const double d2 = std::max(psi_m - 2.0 * psi_m1 + psi_m2, 0.0);
    const double p1 = igamc(std::pow(2.0, static_cast<double>(m) - 2.0), d1 / 2.0);
    const double p2 = igamc(std::pow(2.0, static_cast<double>(m) - 3.0), d2 / 2.0);
    return {p1, p2};
}

double sts_approximate_entropy(const uint8_t* bits, size_t n, uint32_t m) {
    const auto phi = [bits, n](uint32_t mm) {
        std::vector<uint64_t> counts(1ull << mm, 0);
        const uint32_t mask = static_cast<uint32_t>((1ull << mm) - 1);
        uint32_t window = 0;
        for (uint32_t i = 0; i + 1 < mm; ++i) window = (window << 1) | bits[i];
        for (size_t i = 0; i < n; ++i) {
            const uint8_t next = bits[(i + mm - 1) % n];
            window = ((window << 1) | next) & mask;
            ++counts[window];
        }
        double sum = 0.0;
        const double nn = static_cast<double>(n);
        for (uint64_t c : counts) {
            if (c == 0) continue;
            const double p = static_cast<double>(c) / nn;
            sum += p * std::log(p);
        }
        return sum;
    };
    const double apen = phi(m) - phi(m + 1);
    const double chi2 =
        std::max(2.0 * static_cast<double>(n) * (std::log(2.0) - apen), 0.0);
    return igamc(std::pow(2.0, static_cast<double>(m) - 1.0), chi2 / 2.0);
}

namespace {

// Re-executable FFTW plans per length; creation is serialized, execution
// on caller-owned arrays is thread-safe.
fftw_plan dft_plan_for(size_t n) {
    static std::mutex mu;
    static std::map<size_t, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(mu);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(n, p);
    return p;
}

} // namespace

double sts_dft(const uint8_t* bits, size_t n) {
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = bits[i] ? 1.0 : -1.0;
    std::vector<fftw_complex> spec(n / 2 + 1);
    fftw_execute_dft_r2c(dft_plan_for(n), x.data(), spec.data());

    const double threshold = std::sqrt(std::log(1.0 / 0.05) * static_cast<double>(n));
    const size_t half = n / 2;
    uint64_t below = 0;
    for (size_t j = 0; j < half; ++j) {
        const double mag = std::hypot(spec[j][0], spec[j][1]);
        if (mag < threshold) ++below;
    }
    const double n0 = 0.95 * static_cast<double>(n) / 2.0;
    const double d = (static_cast<double>(below) - n0) /
                     std::sqrt(static_cast<double>(n) * 0.95 * 0.05 / 4.0);
    return std::erfc(std::fabs(d) / std::sqrt(2.0));
}

std::pair<double, double> proportion_interval(double alpha, uint64_t n_blocks) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("proportion_interval: alpha in (0,1)");
    if (n_blocks < 1) throw std::invalid_argument("proportion_interval: n_blocks >= 1");
    const double p = 1.0 - alpha;
    const double half = 3.0 * std::sqrt(p * alpha / static_cast<double>(n_blocks));
    return {p - half, p + half};
}

TestReport nist_subset(const BitStream& bits, uint64_t block_len, uint64_t n_blocks,
                       double alpha, const StsParams& params) {
    if (block_len < 128)
        throw std::invalid_argument("nist_subset: block_len must be >= 128 (longest-run table)");
    const uint64_t need = block_len * n_blocks;
    if (bits.size_bits() < need)
        throw std::invalid_argument("nist_subset: insufficient data, need " +
                                    std::to_string(need) + " bits, have " +
                                    std::to_string(bits.size_bits()));

    constexpr const char* NAMES[] = {
        "frequency",         "block_frequency",      "runs",
        "longest_run",       "cumulative_sums_fwd",  "cumulative_sums_rev",
        "serial_1",          "serial_2",             "approximate_entropy",
        "dft",
    };
    constexpr size_t NTESTS = 10;

    std::vector<std::vector<double>> p(NTESTS, std::vector<double>(n_blocks));
    const uint32_t bf_m = params.resolved_block_frequency_m(block_len);

#pragma omp parallel
    {
        std::vector<uint8_t> block(block_len);
#pragma omp for schedule(dynamic)
        for (int64_t b = 0; b < static_cast<int64_t>(n_blocks); ++b) {
            unpack_bits(bits, static_cast<uint64_t>(b) * block_len, block_len, block.data());
            const uint8_t* d = block.data();
            p[0][b] = sts_monobit(d, block_len);
            p[1][b] = sts_block_frequency(d, block_len, bf_m);
            p[2][b] = sts_runs(d, block_len);
            p[3][b] = sts_longest_run(d, block_len);
            const auto cs = sts_cumulative_sums(d, block_len);
            p[4][b] = cs.first;
            p[5][b] = cs.second;
            const auto se = sts_serial(d, block_len, params.serial_m);
            p[6][b] = se.first;
            p[7][b] = se.second;
            p[8][b] = sts_approximate_entropy(d, block_len, params.apen_m);
            p[9][b] = sts_dft(d, block_len);
        }
    }

    TestReport rep;
    rep.alpha = alpha;
    rep.n_blocks = n_blocks;
    rep.block_len = block_len;
    rep.params = params;
    rep.params.block_frequency_m = bf_m;
    std::tie(rep.interval_lo, rep.interval_hi) = proportion_interval(alpha, n_blocks);
    rep.all_pass = true;
    for (size_t t = 0; t < NTESTS; ++t) {
        TestResult tr;
        tr.name = NAMES[t];
        tr.p_values = std::move(p[t]);
        tr.pass_count = 0;
        for (double pv : tr.p_values)
            if (pv >= alpha) ++tr.pass_count;
        tr.proportion = static_cast<double>(tr.pass_count) / static_cast<double>(n_blocks);
        tr.pass = tr.proportion >= rep.interval_lo && tr.proportion <= rep.interval_hi;
        rep.all_pass = rep.all_pass && tr.pass;
        rep.tests.push_back(std::move(tr));
    }
    return rep;
}

} // namespace qrng
