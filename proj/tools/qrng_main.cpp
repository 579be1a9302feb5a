// Command-line front end: plan / run / analyze / bench.
// Exit codes: 0 success, 2 config error, 3 statistical acceptance failure,
// 4 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "qrng/bench.hpp"
#include "qrng/errors.hpp"
#include "qrng/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<uint32_t> channels;
    bool paper_scale = false;
    std::string seed_hex;
    std::string format = "bin";
};

qrng::RunConfig load_config(const CommonArgs& args) {
    qrng::RunConfig cfg = args.config_path.empty()
                              ? qrng::default_run_config()
                              : qrng::parse_config_file(args.config_path);
    if (!args.seed_hex.empty()) {
        cfg.seed = std::stoull(args.seed_hex, nullptr, 16);
    }
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_format = false) {
    cmd->add_option("--config", args.config_path, "Config file (TOML sections)");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--channels", args.channels, "Channel ids to process (default: all)");
    cmd->add_flag("--paper-scale", args.paper_scale,
                  "Paper-scale sizes (1000 x 1 Mbit STS, 1e9-bit pairs)");
    cmd->add_flag_callback("--desk-scale", [&args] { args.paper_scale = false; },
                           "Desk-scale sizes (default)");
    cmd->add_option("--seed", args.seed_hex, "Override the global seed (hex)");
    if (with_format)
        cmd->add_option("--format", args.format, "Bit file format: bin or ascii")
            ->check(CLI::IsMember({"bin", "ascii"}));
}

void print_plan(const qrng::RunConfig& cfg) {
    const qrng::PlanTable table = qrng::make_plan_table(cfg);
    std::printf("%-8s %-12s %-7s %-6s %-6s %-8s %-12s %s\n", "channel", "center",
                "h_min", "n_in", "n_out", "ratio", "C_max", "rate");
    for (const auto& row : table.rows) {
        std::printf("%-8u %-12s %-7.4g %-6u %-6u %-8s %-12s %s Gbps\n", row.id,
                    (std::to_string(static_cast<long long>(row.center_freq_hz / 1e6)) + " MHz")
                        .c_str(),
                    row.h_min, row.plan.n_in, row.plan.n_out,
                    (std::to_string(std::llround(row.plan.ratio * 1000.0) / 10) + "." +
                     std::to_string(std::llround(row.plan.ratio * 1000.0) % 10) + "%")
                        .c_str(),
                    (qrng::format_gbps(std::llround(row.c_max / 1e7)) + " Gbps").c_str(),
                    qrng::format_gbps(row.rate_hundredths).c_str());
    }
    std::printf("cumulative real-time rate: %s Gbps\n",
                qrng::format_gbps(table.cumulative_hundredths).c_str());
}

int do_run(const CommonArgs& args) {
    const qrng::RunConfig cfg = load_config(args);
    qrng::PipelineOptions opt;
    opt.paper_scale = args.paper_scale;
    opt.ascii = args.format == "ascii";
    opt.channel_ids = args.channels;
    const auto result = qrng::run_pipeline(cfg, cfg.out_dir, opt);
    for (const auto& cd : result.channels) {
        std::printf("channel %u: %zu samples, %llu off-scale (%s), %llu blocks, %llu bits out\n",
                    cd.id, cd.raw.codes.size(),
                    static_cast<unsigned long long>(cd.raw.off_scale_count),
                    cd.off_scale_ok ? "within 3sd" : "OUTSIDE 3sd",
                    static_cast<unsigned long long>(cd.blocks),
                    static_cast<unsigned long long>(cd.extracted.size_bits()));
    }
    std::printf("cumulative stream: %llu bits\nmanifest: %s\n",
                static_cast<unsigned long long>(result.cumulative_bits),
                result.manifest_path.string().c_str());
    return 0;
}

int do_analyze(const CommonArgs& args, const std::string& run_dir_arg) {
    const qrng::RunConfig cfg = load_config(args);
    const std::filesystem::path run_dir = run_dir_arg.empty() ? cfg.out_dir : run_dir_arg;
    const std::filesystem::path report_dir =
        args.out_dir.empty() ? run_dir / "analysis" : std::filesystem::path(args.out_dir);
    const auto res = qrng::analyze_run(cfg, run_dir, args.paper_scale, report_dir);

    std::printf("pair independence (|rho| < 5/sqrt(N), mi < bias + 5 SE):\n");
    for (const auto& p : res.pairs) {
        std::printf("  ch%u-ch%u: max|rho| = %.3e (thr %.3e), max mi = %.3e  [%s]\n",
                    p.channel_a, p.channel_b, p.max_abs_rho, p.threshold_rho, p.max_mi,
                    p.pass ? "pass" : "FAIL");
    }
    std::printf("NIST subset proportions (interval [%.5f, %.5f]):\n",
                res.sts_per_channel.empty() ? 0.0 : res.sts_per_channel[0].interval_lo,
                res.sts_per_channel.empty() ? 0.0 : res.sts_per_channel[0].interval_hi);
    for (size_t c = 0; c < res.sts_per_channel.size(); ++c) {
        const auto& rep = res.sts_per_channel[c];
        std::printf("  channel %zu:", c + 1);
        for (const auto& t : rep.tests)
            std::printf(" %s=%.2f%s", t.name.c_str(), t.proportion, t.pass ? "" : "(FAIL)");
        std::printf("\n");
    }
    for (size_t c = 0; c < res.empirical_h.size(); ++c)
        std::printf("channel %zu: empirical min-entropy %.3f bits, byte chi2 p = %.4f\n",
                    c + 1, res.empirical_h[c], res.byte_chi2_p[c]);
    std::printf("%s\n", res.all_pass ? "ALL STATISTICAL GATES PASS" : "STATISTICAL FAILURE");
    return res.all_pass ? 0 : 3;
}

int do_bench(const CommonArgs& args, uint64_t input_bits) {
    const qrng::RunConfig cfg = load_config(args);
    std::printf("%-8s %-10s %-14s %-14s %-14s %-10s %-8s\n", "channel", "kernel",
                "chunked", "naive", "stream", "speedup", "scaling");
    for (const auto& cc : cfg.channels) {
        if (!args.channels.empty() &&
            std::find(args.channels.begin(), args.channels.end(), cc.id) ==
                args.channels.end())
            continue;
        const auto plan =
            qrng::plan_extraction(cc.h_min, cfg.n_in_bits, cc.quant.n_bits, cfg.epsilon());
        const auto spec =
            qrng::seeded_spec_from_prng(cfg.seed, cc.id, plan.n_out, plan.n_in);
        const auto kb = qrng::bench_kernel(spec, input_bits, 3);
        std::printf("%-8u %ux%-6u %8.1f Mb/s %8.2f Mb/s %8.1f Mb/s %7.1fx %7.2f\n", cc.id,
                    kb.m, kb.n, kb.chunked_best_bps / 1e6, kb.naive_best_bps / 1e6,
                    kb.stream_bps / 1e6, kb.speedup, kb.scaling_ratio);
    }
    const auto& cc = cfg.channels.front();
    const auto eb = qrng::bench_end_to_end(cfg, cc, std::max<uint64_t>(100000, cfg.n_samples / 10));
    std::printf("end-to-end (channel %u, %llu samples): %.2f s, %.1f Mb/s raw in, %.1f Mb/s out\n",
                cc.id, static_cast<unsigned long long>(eb.samples), eb.seconds,
                eb.raw_bits_per_sec / 1e6, eb.out_bits_per_sec / 1e6);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parallel vacuum-fluctuation QRNG pipeline (simulation + extraction + tests)"};
    app.require_subcommand(1);

    CommonArgs plan_args;
    CommonArgs run_args;
    CommonArgs analyze_args;
    CommonArgs bench_args;
    std::string run_dir;
    uint64_t bench_bits = 100000000ull;

    auto* plan = app.add_subcommand("plan", "Print extraction plans and the rate table");
    add_common(plan, plan_args);
    auto* run = app.add_subcommand("run", "Simulate, extract and write output streams");
    add_common(run, run_args, true);
    auto* analyze = app.add_subcommand("analyze", "Statistical reports for a finished run");
    add_common(analyze, analyze_args);
    analyze->add_option("--run-dir", run_dir, "Run directory (default: config out_dir)");
    auto* bench = app.add_subcommand("bench", "Extractor throughput measurements");
    add_common(bench, bench_args);
    bench->add_option("--bits", bench_bits, "Kernel input bits per measurement");

    try {
        app.parse(argc, argv);
        if (plan->parsed()) {
            print_plan(load_config(plan_args));
            return 0;
        }
        if (run->parsed()) return do_run(run_args);
        if (analyze->parsed()) return do_analyze(analyze_args, run_dir);
        if (bench->parsed()) return do_bench(bench_args, bench_bits);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const qrng::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const qrng::IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
