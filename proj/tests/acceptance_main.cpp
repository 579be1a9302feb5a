// End-to-end acceptance suite. Runs each criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion; exit code 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qrng/bench.hpp"
#include "qrng/pipeline.hpp"
#include "qrng/special.hpp"

using namespace qrng;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s — %s\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double now() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// --- criterion 1: extractor sizing reproduces the published matrices -----
void criterion_1() {
    const double eps = std::exp2(-50);
    const auto p1 = plan_extraction(14.2, 768, 16, eps);
    const auto p2 = plan_extraction(13.5, 768, 16, eps);
    const auto p3 = plan_extraction(12.9, 768, 16, eps);
    const double ratio_pct = std::round(p1.ratio * 1000.0) / 10.0;
    const bool pass =
        p1.n_out == 581 && p2.n_out == 548 && p3.n_out == 519 && ratio_pct == 75.7;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "n_out = %u/%u/%u, ratio = %.1f%%", p1.n_out,
                  p2.n_out, p3.n_out, ratio_pct);
    report(1, pass, buf);
}

// --- criterion 2: rate arithmetic ----------------------------------------
void criterion_2() {
    const double eps = std::exp2(-50);
    const int64_t r1 = rate_gbps_hundredths(240000000, 16, plan_extraction(14.2, 768, 16, eps));
    const int64_t r2 = rate_gbps_hundredths(240000000, 16, plan_extraction(13.5, 768, 16, eps));
    const int64_t r3 = rate_gbps_hundredths(240000000, 16, plan_extraction(12.9, 768, 16, eps));
    const bool pass = r1 == 291 && r2 == 274 && r3 == 260 && (r1 + r2 + r3) == 825;
    report(2, pass,
           format_gbps(r1) + " / " + format_gbps(r2) + " / " + format_gbps(r3) +
               " Gbps, cumulative " + format_gbps(r1 + r2 + r3) + " Gbps");
}

// --- criterion 3: proportion interval ------------------------------------
void criterion_3() {
    const auto [lo, hi] = proportion_interval(0.01, 1000);
    const double half = (hi - lo) / 2.0;
    const double half5 = std::round(half * 1e5) / 1e5;
    const bool pass = half5 == 0.00944 && std::fabs((lo + hi) / 2.0 - 0.99) < 1e-12;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "0.99 +- %.5f", half5);
    report(3, pass, buf);
}

// --- criterion 4: kernel oracle equivalence and linearity -----------------
void criterion_4() {
    const double t0 = now();
    std::mt19937_64 rng(0xACCE);
    auto random_bits = [&rng](uint64_t n) {
        BitStream s;
        for (uint64_t i = 0; i < n; ++i) s.push_bit(rng() & 1);
        return s;
    };
    uint64_t mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        const uint32_t m = 1 + static_cast<uint32_t>(rng() % 64);
        const uint32_t n = 1 + static_cast<uint32_t>(rng() % 128);
        const auto spec = build_toeplitz(random_bits(m + n - 1), m, n);
        const BitStream x = random_bits(n);
        std::vector<uint8_t> xb(((n + 7) / 8) + 1, 0);
        x.extract(0, n, xb.data());
        std::vector<uint8_t> y_naive((m + 7) / 8);
        std::vector<uint8_t> y_fast((m + 7) / 8);
        multiply_naive(spec, xb.data(), y_naive.data());
        const ToeplitzKernel k(spec);
        k.multiply(xb.data(), y_fast.data());
        if (y_naive != y_fast) ++mismatches;
    }
    uint64_t linearity_violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const uint32_t m = 1 + static_cast<uint32_t>(rng() % 64);
        const uint32_t n = 1 + static_cast<uint32_t>(rng() % 128);
        const auto spec = build_toeplitz(random_bits(m + n - 1), m, n);
        const ToeplitzKernel k(spec);
        const BitStream x1 = random_bits(n);
        const BitStream x2 = random_bits(n);
        BitStream x12;
        for (uint32_t j = 0; j < n; ++j) x12.push_bit(x1.bit(j) != x2.bit(j));
        std::vector<uint8_t> b1(((n + 7) / 8) + 1, 0);
        std::vector<uint8_t> b2 = b1;
        std::vector<uint8_t> b12 = b1;
        x1.extract(0, n, b1.data());
        x2.extract(0, n, b2.data());
        x12.extract(0, n, b12.data());
        std::vector<uint8_t> y1((m + 7) / 8);
        std::vector<uint8_t> y2((m + 7) / 8);
        std::vector<uint8_t> y12((m + 7) / 8);
        k.multiply(b1.data(), y1.data());
        k.multiply(b2.data(), y2.data());
        k.multiply(b12.data(), y12.data());
        for (size_t b = 0; b < y12.size(); ++b)
            if (static_cast<uint8_t>(y1[b] ^ y2[b]) != y12[b]) {
                ++linearity_violations;
                break;
            }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "1000 oracle instances, %llu mismatches; 1000 linearity pairs, "
                  "%llu violations (%.1f s)",
                  static_cast<unsigned long long>(mismatches),
                  static_cast<unsigned long long>(linearity_violations), now() - t0);
    report(4, mismatches == 0 && linearity_violations == 0 && now() - t0 < 30.0, buf);
}

// --- criterion 5: min-entropy estimator vs quadrature oracle --------------
void criterion_5() {
    const double t0 = now();
    const double sigma_qs[] = {0.5, 0.8, 1.0, 1.3, 1.7};
    const double sigma_es[] = {0.0, 0.05, 0.1, 0.2, 0.4};
    const double ranges[] = {2.0, 4.0, 8.0};
    double worst = 0.0;
    bool monotone = true;
    int points = 0;
    for (double sq : sigma_qs) {
        for (double r : ranges) {
            QuantizerSpec q{8, r};
            double prev = std::numeric_limits<double>::infinity();
            for (double se : sigma_es) {
                const auto est = estimate_min_entropy({sq, se}, q, 5.0);
                const double href = oracle::min_entropy({sq, se}, q, 5.0);
                worst = std::max(worst, std::fabs(est.h_min - href));
                if (est.h_min > prev + 1e-9) monotone = false;
                prev = est.h_min;
                ++points;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%d grid points, max |impl - oracle| = %.2e bits, monotone in "
                  "sigma_e: %s (%.1f s)",
                  points, worst, monotone ? "yes" : "NO", now() - t0);
    report(5, worst <= 1e-6 && monotone && now() - t0 < 60.0, buf);
}

// --- criteria 6, 7, 9: desk-scale end-to-end ------------------------------
void criteria_6_7_9() {
    const RunConfig cfg = default_run_config();
    const auto base = std::filesystem::temp_directory_path() / "qrng_acceptance";
    std::filesystem::remove_all(base);

    const double t0 = now();
    const RunResult run_a = run_pipeline(cfg, base / "a");
    const RunResult run_b = run_pipeline(cfg, base / "b");
    const double run_seconds = now() - t0;

    // criterion 9: byte-identical outputs and manifests
    {
        bool identical = true;
        std::string first_diff;
        const char* files[] = {"ch1.raw",        "ch2.raw",      "ch3.raw",
                               "ch1_bits.bin",   "ch2_bits.bin", "ch3_bits.bin",
                               "cumulative.bin", "manifest.json"};
        for (const char* f : files) {
            if (read_file(base / "a" / f) != read_file(base / "b" / f)) {
                identical = false;
                first_diff = f;
                break;
            }
        }
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "two desk-scale runs, 8 output files compared%s%s (%.1f s)",
                      identical ? "" : ", first difference: ",
                      identical ? "" : first_diff.c_str(), run_seconds);
        report(9, identical, buf);
    }

    // criterion 6: NIST subset proportions per channel
    {
        const double t6 = now();
        bool all_pass = true;
        std::string detail;
        for (const auto& cd : run_a.channels) {
            const TestReport rep =
                nist_subset(cd.extracted, cfg.sts_block_len, cfg.sts_blocks, cfg.sts_alpha);
            double min_prop = 1.0;
            for (const auto& t : rep.tests) {
                min_prop = std::min(min_prop, t.proportion);
                if (!t.pass) {
                    all_pass = false;
                    detail += " ch" + std::to_string(cd.id) + ":" + t.name + "=" +
                              std::to_string(t.proportion);
                }
            }
            char frag[64];
            std::snprintf(frag, sizeof(frag), " ch%u(min %.2f)", cd.id, min_prop);
            detail += frag;
        }
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "3 channels x 100 blocks x 100 kbit, interval [%.5f, %.5f]:%s (%.1f s)",
                      proportion_interval(cfg.sts_alpha, cfg.sts_blocks).first,
                      proportion_interval(cfg.sts_alpha, cfg.sts_blocks).second,
                      detail.c_str(), now() - t6);
        report(6, all_pass && run_seconds + (now() - t6) < 600.0, buf);
    }

    // criterion 7: pairwise independence on 1e7 bits
    {
        const double t7 = now();
        bool all_pass = true;
        double worst_rho = 0.0;
        double worst_mi_margin = 0.0;
        for (size_t a = 0; a < run_a.channels.size(); ++a) {
            for (size_t b = a + 1; b < run_a.channels.size(); ++b) {
                const BitStream xa = run_a.channels[a].extracted.slice(0, cfg.analysis_bits);
                const BitStream xb = run_a.channels[b].extracted.slice(0, cfg.analysis_bits);
                const auto rep = correlate_pair(xa, xb, cfg.max_lag,
                                                run_a.channels[a].id, run_a.channels[b].id);
                all_pass = all_pass && rep.pass;
                worst_rho = std::max(worst_rho, rep.max_abs_rho / rep.threshold_rho);
                for (size_t i = 0; i < rep.mi.size(); ++i)
                    worst_mi_margin =
                        std::max(worst_mi_margin, rep.mi[i] / rep.mi_threshold[i]);
            }
        }
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "3 pairs, |k| <= %d on 1e7 bits: max rho/thr = %.2f, max mi/thr "
                      "= %.2f (%.1f s)",
                      cfg.max_lag, worst_rho, worst_mi_margin, now() - t7);
        report(7, all_pass && now() - t7 < 300.0, buf);
    }
    std::filesystem::remove_all(base);
}

// --- criterion 8: off-scale accounting ------------------------------------
void criterion_8() {
    const double t0 = now();
    NoiseModel m{1.0, 0.5};
    const double sigma_total = m.sigma_total();
    QuantizerSpec q{16, 4.0 * sigma_total};
    const size_t n = 10000000;
    const NoiseTracks tracks = synth_wideband(m, n, 0x0FF5CA1E, 1);
    const auto blk = quantize(tracks.sum(), q);
    const double p = 2.0 * normal_cdf(-4.0);
    const double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    const double frac = static_cast<double>(blk.off_scale_count) / static_cast<double>(n);
    const bool pass = std::fabs(frac - p) <= 3.0 * sd && now() - t0 < 60.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "R = 4 sigma over 1e7 samples: observed %.3e vs 2*Phi(-4) = %.3e "
                  "(|z| = %.2f of 3) (%.1f s)",
                  frac, p, std::fabs(frac - p) / sd, now() - t0);
    report(8, pass, buf);
}

// --- criterion 10: throughput floor ---------------------------------------
void criterion_10() {
    const double t0 = now();
    const auto spec = seeded_spec_from_prng(default_run_config().seed, 1, 581, 768);
    const auto kb = bench_kernel(spec, 100000000ull, 3);
    const bool pass = kb.chunked_best_bps >= 100.0e6 && kb.speedup >= 5.0 &&
                      now() - t0 < 120.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "581x768 single-thread: %.0f Mbit/s in (floor 100), naive %.2f "
                  "Mbit/s, speedup %.0fx (floor 5x) (%.1f s)",
                  kb.chunked_best_bps / 1e6, kb.naive_best_bps / 1e6, kb.speedup,
                  now() - t0);
    report(10, pass, buf);
}

} // namespace

int main() {
    const double t0 = now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criteria_6_7_9();
    criterion_8();
    criterion_10();
    std::printf("%d of 10 criteria passed (%.1f s total)\n", 10 - g_failures,
                now() - t0);
    return g_failures == 0 ? 0 : 1;
}
