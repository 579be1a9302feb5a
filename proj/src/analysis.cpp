#include "qrng/analysis.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "qrng/special.hpp"

namespace qrng {

namespace {

uint64_t and_popcount(const uint8_t* a, const uint8_t* b, size_t nbytes) {
    uint64_t total = 0;
    size_t i = 0;
    for (; i + 8 <= nbytes; i += 8) {
        uint64_t wa;
        uint64_t wb;
        std::memcpy(&wa, a + i, 8);
        std::memcpy(&wb, b + i, 8);
        total += std::popcount(wa & wb);
    }
    for (; i < nbytes; ++i) total += std::popcount(static_cast<unsigned>(a[i] & b[i]));
    return total;
}

uint64_t popcount_bytes(const uint8_t* a, size_t nbytes) {
    uint64_t total = 0;
    size_t i = 0;
    for (; i + 8 <= nbytes; i += 8) {
        uint64_t w;
        std::memcpy(&w, a + i, 8);
        total += std::popcount(w);
    }
    for (; i < nbytes; ++i) total += std::popcount(static_cast<unsigned>(a[i]));
    return total;
}

} // namespace

JointCounts joint_counts(const BitStream& x, const BitStream& y, int lag) {
    if (x.size_bits() != y.size_bits())
        throw std::invalid_argument("joint_counts: streams must have equal length");
    const uint64_t n = x.size_bits();
    const uint64_t a = static_cast<uint64_t>(std::abs(lag));
    if (a >= n) throw std::invalid_argument("joint_counts: |lag| must be below the length");
    const uint64_t overlap = n - a;
    const uint64_t x_off = lag >= 0 ? 0 : a;
    const uint64_t y_off = lag >= 0 ? a : 0;

    const size_t nbytes = (overlap + 7) / 8;
    std::vector<uint8_t> bx(nbytes + 8, 0);
    std::vector<uint8_t> by(nbytes + 8, 0);
    x.extract(x_off, overlap, bx.data());
    y.extract(y_off, overlap, by.data());

    JointCounts jc;
    jc.overlap = overlap;
    jc.n11 = and_popcount(bx.data(), by.data(), nbytes);
    jc.nx1 = popcount_bytes(bx.data(), nbytes);
    jc.ny1 = popcount_bytes(by.data(), nbytes);
    return jc;
}

std::map<int, double> cross_correlation(const BitStream& x, const BitStream& y,
                                        int max_lag) {
    if (max_lag < 0) throw std::invalid_argument("cross_correlation: max_lag >= 0");
    const uint64_t n = x.size_bits();
    if (x.size_bits() != y.size_bits())
        throw std::invalid_argument("cross_correlation: streams must have equal length");
    if (n < 10u * static_cast<uint64_t>(std::max(1, max_lag)))
        throw std::invalid_argument("cross_correlation: need length >= 10 * max_lag");

    const double nx = static_cast<double>(x.count_ones());
    const double ny = static_cast<double>(y.count_ones());
    const double nn = static_cast<double>(n);
    const double mx = (2.0 * nx - nn) / nn; // mean of the +-1 sequence
    const double my = (2.0 * ny - nn) / nn;
    const double vx = 1.0 - mx * mx;
    const double vy = 1.0 - my * my;
    if (!(vx > 0.0) || !(vy > 0.0))
        throw std::invalid_argument("cross_correlation: degenerate (constant) stream");
    const double sx = std::sqrt(vx);
    const double sy = std::sqrt(vy);

    std::vector<int> lags;
    for (int k = -max_lag; k <= max_lag; ++k) lags.push_back(k);
    std::vector<double> vals(lags.size());
#pragma omp parallel for schedule(dynamic)
    for (int64_t idx = 0; idx < static_cast<int64_t>(lags.size()); ++idx) {
        const int k = lags[idx];
        const JointCounts jc = joint_counts(x, y, k);
        const double nk = static_cast<double>(jc.overlap);
        // sum over overlap of x'y' with x',y' in {-1,+1}
        const double sum_xy = 4.0 * static_cast<double>(jc.n11) -
                              2.0 * static_cast<double>(jc.nx1) -
                              2.0 * static_cast<double>(jc.ny1) + nk;
        const double sum_x = 2.0 * static_cast<double>(jc.nx1) - nk;
        const double sum_y = 2.0 * static_cast<double>(jc.ny1) - nk;
        const double num = sum_xy - my * sum_x - mx * sum_y + nk * mx * my;
        vals[idx] = std::fabs(num / (sx * sy)) / nk;
    }
    std::map<int, double> rho;
    for (size_t i = 0; i < lags.size(); ++i) rho[lags[i]] = vals[i];
    return rho;
}

namespace {

double plug_in_mi(const JointCounts& jc) {
    const double n = static_cast<double>(jc.overlap);
    const double p11 = static_cast<double>(jc.n11) / n;
    const double px1 = static_cast<double>(jc.nx1) / n;
    const double py1 = static_cast<double>(jc.ny1) / n;
    if (px1 <= 0.0 || px1 >= 1.0 || py1 <= 0.0 || py1 >= 1.0)
        throw std::invalid_argument("mutual_information: degenerate marginal");
    const double p10 = px1 - p11;
    const double p01 = py1 - p11;
    const double p00 = 1.0 - px1 - py1 + p11;
    double mi = 0.0;
    const auto add = [&mi](double pj, double pa, double pb) {
        if (pj > 0.0) mi += pj * std::log2(pj / (pa * pb));
    };
    add(p11, px1, py1);
    add(p10, px1, 1.0 - py1);
    add(p01, 1.0 - px1, py1);
    add(p00, 1.0 - px1, 1.0 - py1);
    return mi;
}

} // namespace

double mutual_information(const BitStream& x, const BitStream& y, int lag) {
    return plug_in_mi(joint_counts(x, y, lag));
}

double mi_bias_bound(uint64_t n) {
    return 1.0 / (2.0 * static_cast<double>(n) * std::log(2.0));
}

double mi_standard_error(uint64_t n) {
    return std::sqrt(2.0) / (2.0 * static_cast<double>(n) * std::log(2.0));
}

CorrelationReport correlate_pair(const BitStream& x, const BitStream& y, int max_lag,
                                 uint32_t channel_a, uint32_t channel_b) {
    CorrelationReport rep;
    rep.channel_a = channel_a;
    rep.channel_b = channel_b;
    rep.n_bits_used = x.size_bits();
    rep.max_lag = max_lag;
    rep.threshold_rho = 5.0 / std::sqrt(static_cast<double>(x.size_bits()));

    const auto rho = cross_correlation(x, y, max_lag);
    bool pass = true;
    for (const auto& [k, v] : rho) {
        rep.lags.push_back(k);
        rep.rho.push_back(v);
        rep.max_abs_rho = std::max(rep.max_abs_rho, v);
        if (v >= rep.threshold_rho) pass = false;
    }
    rep.mi.resize(rep.lags.size());
    rep.mi_threshold.resize(rep.lags.size());
#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < static_cast<int64_t>(rep.lags.size()); ++i) {
        const JointCounts jc = joint_counts(x, y, rep.lags[i]);
        rep.mi[i] = plug_in_mi(jc);
        rep.mi_threshold[i] = mi_bias_bound(jc.overlap) + 5.0 * mi_standard_error(jc.overlap);
    }
    for (size_t i = 0; i < rep.lags.size(); ++i) {
        rep.max_mi = std::max(rep.max_mi, rep.mi[i]);
        if (rep.mi[i] >= rep.mi_threshold[i]) pass = false;
    }
    rep.pass = pass;
    return rep;
}

double empirical_min_entropy(const RawSampleBlock& block) {
    if (block.codes.size() < 100000)
        throw std::invalid_argument("empirical_min_entropy: need at least 1e5 samples");
    const Histogram h = code_histogram(block.codes, block.n_bits);
    uint64_t max_count = 0;
    for (uint64_t c : h.counts) max_count = std::max(max_count, c);
    return -std::log2(static_cast<double>(max_count) / static_cast<double>(h.total));
}

Histogram code_histogram(std::span<const uint32_t> codes, unsigned n_bits) {
    if (codes.empty()) throw std::invalid_argument("code_histogram: empty input");
    if (n_bits < 2 || n_bits > 24) throw std::invalid_argument("code_histogram: bad n_bits");
    Histogram h;
    h.counts.assign(1ull << n_bits, 0);
    for (uint32_t c : codes) ++h.counts[c];
    h.total = codes.size();
    return h;
}

ByteUniformity byte_uniformity(const BitStream& bits) {
    const uint64_t nbytes = bits.size_bits() / 8;
    if (nbytes == 0) throw std::invalid_argument("byte_uniformity: need at least one byte");
    ByteUniformity u;
    const uint8_t* p = bits.data();
    for (uint64_t i = 0; i < nbytes; ++i) ++u.counts[p[i]];
    const double expected = static_cast<double>(nbytes) / 256.0;
    double chi2 = 0.0;
    for (uint64_t c : u.counts) {
        const double d = static_cast<double>(c) - expected;
        chi2 += d * d / expected;
    }
    u.chi2 = chi2;
    u.p_value = chi_square_pvalue(chi2, 255.0);
    return u;
}

} // namespace qrng
