#include "qrng/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>

#include "qrng/bitmap.hpp"
#include "qrng/errors.hpp"
#include "qrng/special.hpp"

namespace qrng {

using nlohmann::json;

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string hex_of(const BitStream& s) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(s.size_bytes() * 2);
    for (uint8_t b : s.bytes()) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::string seed_hex(uint64_t seed) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(seed));
    return buf;
}

} // namespace

ChannelData produce_channel(const RunConfig& cfg, const ChannelConfig& cc,
                            uint64_t n_samples) {
    ChannelData out;
    out.id = cc.id;
    out.plan = plan_extraction(cc.h_min, cfg.n_in_bits, cc.quant.n_bits, cfg.epsilon());
    out.toeplitz = cc.toeplitz_seed_file.empty()
                       ? seeded_spec_from_prng(cfg.seed, cc.id, out.plan.n_out, out.plan.n_in)
                       : seeded_spec_from_file(cc.toeplitz_seed_file, out.plan.n_out,
                                               out.plan.n_in);

    const double t0 = now_seconds();
    out.raw = simulate_channel(cc.chan, cc.noise, cc.quant, n_samples, cfg.seed);
    out.sim_seconds = now_seconds() - t0;

    const double t1 = now_seconds();
    const BitStream raw_bits = pack_samples(out.raw);
    ExtractorState state(out.toeplitz);
    state.feed(raw_bits, out.extracted);
    out.discarded_tail_bits = state.finish();
    out.blocks = state.blocks_processed();
    out.extract_seconds = now_seconds() - t1;

    const auto taps = design_lowpass(cc.chan.filter, cc.chan.internal_rate_hz);
    const double sigma_out = chain_sigma_scale(cc.chan, taps) * cc.noise.sigma_total();
    const double p = 2.0 * normal_cdf(-cc.quant.range_r / sigma_out);
    out.expected_off_scale = p;
    out.off_scale_sd = std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
    const double frac = static_cast<double>(out.raw.off_scale_count) /
                        static_cast<double>(n_samples);
    out.off_scale_ok = std::fabs(frac - p) <= 3.0 * out.off_scale_sd;
    return out;
}

BitStream interleave_blocks(const std::vector<const BitStream*>& streams,
                            const std::vector<uint32_t>& block_bits) {
    if (streams.size() != block_bits.size() || streams.empty())
        throw std::invalid_argument("interleave_blocks: stream/block size mismatch");
    uint64_t blocks = streams[0]->size_bits() / block_bits[0];
    uint64_t total = 0;
    for (size_t c = 0; c < streams.size(); ++c) {
        const uint64_t b = streams[c]->size_bits() / block_bits[c];
        if (b != blocks)
            throw std::invalid_argument("interleave_blocks: channels hold different block counts");
        total += streams[c]->size_bits();
    }
    BitStream out(total);
    for (uint64_t b = 0; b < blocks; ++b)
        for (size_t c = 0; c < streams.size(); ++c)
            out.append_bits(streams[c]->data(),
                            b * static_cast<uint64_t>(block_bits[c]), block_bits[c]);
    return out;
}

std::vector<BitStream> deinterleave_blocks(const BitStream& cumulative,
                                           const std::vector<uint32_t>& block_bits,
                                           uint64_t blocks_per_channel) {
    std::vector<BitStream> out(block_bits.size());
    uint64_t pos = 0;
    for (uint64_t b = 0; b < blocks_per_channel; ++b) {
        for (size_t c = 0; c < block_bits.size(); ++c) {
            out[c].append_bits(cumulative.data(), pos, block_bits[c]);
            pos += block_bits[c];
        }
    }
    if (pos != cumulative.size_bits())
        throw std::invalid_argument("deinterleave_blocks: length mismatch");
    return out;
}

namespace {

std::vector<const ChannelConfig*> select_channels(const RunConfig& cfg,
                                                  const PipelineOptions& opt) {
    std::vector<const ChannelConfig*> picked;
    for (const auto& cc : cfg.channels) {
        if (opt.channel_ids.empty() ||
            std::find(opt.channel_ids.begin(), opt.channel_ids.end(), cc.id) !=
                opt.channel_ids.end())
            picked.push_back(&cc);
    }
    if (picked.empty()) throw ConfigError("no configured channel matches --channels");
    return picked;
}

} // namespace

RunResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& out_dir,
                       const PipelineOptions& opt) {
    const auto picked = select_channels(cfg, opt);
    const uint64_t n_samples = opt.samples_override
                                   ? opt.samples_override
                                   : (opt.paper_scale ? cfg.paper_samples : cfg.n_samples);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir.string());

    RunResult result;
    const char* bit_ext = opt.ascii ? "txt" : "bin";
    json jchannels = json::array();
    json jlog_channels = json::array();

    for (const ChannelConfig* cc : picked) {
        ChannelData cd = produce_channel(cfg, *cc, n_samples);

        const std::string raw_name = "ch" + std::to_string(cd.id) + ".raw";
        const std::string bits_name = "ch" + std::to_string(cd.id) + "_bits." + bit_ext;
        write_raw(out_dir / raw_name, cd.raw);
        if (opt.ascii)
            cd.extracted.write_ascii(out_dir / bits_name);
        else
            cd.extracted.write_binary(out_dir / bits_name);

        jchannels.push_back({
            {"id", cd.id},
            {"center_freq_hz", cc->chan.center_freq_hz},
            {"h_min", cc->h_min},
            {"n_in", cd.plan.n_in},
            {"n_out", cd.plan.n_out},
            {"extraction_ratio", cd.plan.ratio},
            {"toeplitz_seed_source",
             cc->toeplitz_seed_file.empty() ? std::string("prng") : cc->toeplitz_seed_file},
            {"toeplitz_seed_hex", hex_of(cd.toeplitz.seed)},
            {"samples", n_samples},
            {"off_scale_count", cd.raw.off_scale_count},
            {"expected_off_scale_fraction", cd.expected_off_scale},
            {"off_scale_within_3sd", cd.off_scale_ok},
            {"blocks", cd.blocks},
            {"bits_out", cd.extracted.size_bits()},
            {"discarded_tail_bits", cd.discarded_tail_bits},
            {"raw_file", raw_name},
            {"bits_file", bits_name},
        });
        jlog_channels.push_back({
            {"id", cd.id},
            {"simulate_seconds", cd.sim_seconds},
            {"extract_seconds", cd.extract_seconds},
            {"extract_input_bits_per_sec",
             cd.extract_seconds > 0
                 ? static_cast<double>(n_samples) * cc->quant.n_bits / cd.extract_seconds
                 : 0.0},
        });
        result.channels.push_back(std::move(cd));
    }

    // Cumulative stream: block-granular round-robin in channel order.
    std::vector<const BitStream*> streams;
    std::vector<uint32_t> widths;
    for (const auto& cd : result.channels) {
        streams.push_back(&cd.extracted);
        widths.push_back(cd.plan.n_out);
    }
    const BitStream cumulative = interleave_blocks(streams, widths);
    result.cumulative_bits = cumulative.size_bits();
    const std::string cum_name = std::string("cumulative.") + bit_ext;
    if (opt.ascii)
        cumulative.write_ascii(out_dir / cum_name);
    else
        cumulative.write_binary(out_dir / cum_name);

    // manifest.json carries everything needed to reproduce the run
    // byte-for-byte; wall-clock data goes to run_log.json instead so two
    // identical runs produce identical manifests.
    json manifest = {
        {"format", "qrng-run-manifest"},
        {"version", 1},
        {"prng", cfg.prng_name},
        {"seed", seed_hex(cfg.seed)},
        {"epsilon_log2", cfg.epsilon_log2},
        {"k_sigma", cfg.k_sigma},
        {"n_in_bits", cfg.n_in_bits},
        {"samples_per_channel", n_samples},
        {"bit_format", opt.ascii ? "ascii" : "bin"},
        {"channels", jchannels},
        {"cumulative",
         {{"file", cum_name},
          {"bits", result.cumulative_bits},
          {"channel_order", [&] {
               json a = json::array();
               for (const auto& cd : result.channels) a.push_back(cd.id);
               return a;
           }()}}},
    };
    result.manifest_path = out_dir / "manifest.json";
    {
        std::ofstream f(result.manifest_path);
        if (!f) throw IoError("cannot write manifest: " + result.manifest_path.string());
        f << manifest.dump(2) << "\n";
    }
    {
        const auto stamp = std::chrono::system_clock::now().time_since_epoch();
        json runlog = {
            {"unix_time", std::chrono::duration<double>(stamp).count()},
            {"channels", jlog_channels},
        };
        std::ofstream f(out_dir / "run_log.json");
        if (!f) throw IoError("cannot write run log");
        f << runlog.dump(2) << "\n";
    }
    return result;
}

PlanTable make_plan_table(const RunConfig& cfg) {
    PlanTable table;
    for (const auto& cc : cfg.channels) {
        PlanRow row;
        row.id = cc.id;
        row.center_freq_hz = cc.chan.center_freq_hz;
        row.h_min = cc.h_min;
        row.plan = plan_extraction(cc.h_min, cfg.n_in_bits, cc.quant.n_bits, cfg.epsilon());
        row.c_max = max_rate(cc.h_min, cc.quant, cc.chan.lpf_cutoff_hz);
        row.rate_hundredths = rate_gbps_hundredths(
            static_cast<uint64_t>(std::llround(cc.chan.f_s_out_hz)), cc.quant.n_bits,
            row.plan);
        table.cumulative_hundredths += row.rate_hundredths;
        table.rows.push_back(row);
    }
    return table;
}

AnalysisResult analyze_run(const RunConfig& cfg, const std::filesystem::path& run_dir,
                           bool paper_scale, const std::filesystem::path& report_dir) {
    std::ifstream mf(run_dir / "manifest.json");
    if (!mf) throw IoError("cannot open manifest: " + (run_dir / "manifest.json").string());
    json manifest;
    try {
        mf >> manifest;
    } catch (const std::exception& e) {
        throw IoError("malformed manifest.json: " + std::string(e.what()));
    }

    std::error_code ec;
    std::filesystem::create_directories(report_dir, ec);
    if (ec) throw IoError("cannot create report directory: " + report_dir.string());

    const bool ascii = manifest.at("bit_format") == "ascii";
    struct Loaded {
        uint32_t id;
        BitStream bits;
        RawSampleBlock raw;
    };
    std::vector<Loaded> chans;
    for (const auto& jc : manifest.at("channels")) {
        Loaded l;
        l.id = jc.at("id").get<uint32_t>();
        const uint64_t nbits = jc.at("bits_out").get<uint64_t>();
        const auto bits_path = run_dir / jc.at("bits_file").get<std::string>();
        l.bits = ascii ? BitStream::read_ascii(bits_path)
                       : BitStream::read_binary(bits_path, nbits);
        l.raw = read_raw(run_dir / jc.at("raw_file").get<std::string>());
        chans.push_back(std::move(l));
    }

    AnalysisResult res;
    res.all_pass = true;
    const uint64_t pair_bits = cfg.analysis_bits;
    const uint64_t block_len = paper_scale ? cfg.paper_sts_block_len : cfg.sts_block_len;
    const uint64_t n_blocks = paper_scale ? cfg.paper_sts_blocks : cfg.sts_blocks;

    json jpairs = json::array();
    for (size_t a = 0; a < chans.size(); ++a) {
        for (size_t b = a + 1; b < chans.size(); ++b) {
            const uint64_t usable =
                std::min({pair_bits, chans[a].bits.size_bits(), chans[b].bits.size_bits()});
            const BitStream xa = chans[a].bits.slice(0, usable);
            const BitStream xb = chans[b].bits.slice(0, usable);
            CorrelationReport rep =
                correlate_pair(xa, xb, cfg.max_lag, chans[a].id, chans[b].id);
            res.all_pass = res.all_pass && rep.pass;
            json jp = {
                {"channel_a", rep.channel_a},
                {"channel_b", rep.channel_b},
                {"n_bits_used", rep.n_bits_used},
                {"max_lag", rep.max_lag},
                {"threshold_rho", rep.threshold_rho},
                {"max_abs_rho", rep.max_abs_rho},
                {"max_mi", rep.max_mi},
                {"lags", rep.lags},
                {"rho", rep.rho},
                {"mi", rep.mi},
                {"mi_threshold", rep.mi_threshold},
                {"pass", rep.pass},
            };
            jpairs.push_back(std::move(jp));
            res.pairs.push_back(std::move(rep));
        }
    }

    json jsts = json::array();
    for (const auto& ch : chans) {
        TestReport rep = nist_subset(ch.bits, block_len, n_blocks, cfg.sts_alpha);
        res.all_pass = res.all_pass && rep.all_pass;
        json jt = {
            {"channel", ch.id},
            {"alpha", rep.alpha},
            {"n_blocks", rep.n_blocks},
            {"block_len", rep.block_len},
            {"interval", {rep.interval_lo, rep.interval_hi}},
            {"all_pass", rep.all_pass},
        };
        json rows = json::array();
        for (const auto& t : rep.tests) {
            rows.push_back({{"name", t.name},
                            {"proportion", t.proportion},
                            {"pass_count", t.pass_count},
                            {"pass", t.pass}});
        }
        jt["tests"] = std::move(rows);
        jsts.push_back(std::move(jt));
        res.sts_per_channel.push_back(std::move(rep));
    }

    json jhist = json::array();
    for (const auto& ch : chans) {
        res.empirical_h.push_back(empirical_min_entropy(ch.raw));
        const ByteUniformity u = byte_uniformity(ch.bits);
        res.byte_chi2_p.push_back(u.p_value);
        res.all_pass = res.all_pass && u.p_value >= cfg.sts_alpha;
        jhist.push_back({{"channel", ch.id},
                         {"empirical_min_entropy_bits", res.empirical_h.back()},
                         {"extracted_byte_chi2", u.chi2},
                         {"extracted_byte_chi2_p", u.p_value}});
    }

    // Fig.-style artifacts: per-channel 64x64 bitmaps and pairwise XOR maps.
    json jxor = json::array();
    std::vector<BitmapImage> maps;
    for (const auto& ch : chans) {
        maps.push_back(bitmap_from_bits(ch.bits, 64, 64));
        write_pbm_p4(report_dir / ("bitmap_ch" + std::to_string(ch.id) + ".pbm"),
                     maps.back());
    }
    for (size_t a = 0; a < maps.size(); ++a) {
        for (size_t b = a + 1; b < maps.size(); ++b) {
            const BitmapImage x = xor_bitmap(maps[a], maps[b]);
            write_pbm_p4(report_dir / ("xor_ch" + std::to_string(chans[a].id) + "_ch" +
                                       std::to_string(chans[b].id) + ".pbm"),
                         x);
            std::vector<uint8_t> bits01(x.bits.size_bits());
            unpack_bits(x.bits, 0, x.bits.size_bits(), bits01.data());
            const double p = sts_monobit(bits01.data(), bits01.size());
            res.xor_monobit_p.push_back(p);
            res.all_pass = res.all_pass && p >= cfg.sts_alpha;
            jxor.push_back({{"channel_a", chans[a].id},
                            {"channel_b", chans[b].id},
                            {"monobit_p", p}});
        }
    }

    json report = {
        {"format", "qrng-analysis-report"},
        {"version", 1},
        {"pair_analysis", jpairs},
        {"sts", jsts},
        {"histograms", jhist},
        {"xor_bitmaps", jxor},
        {"all_pass", res.all_pass},
    };
    std::ofstream rf(report_dir / "analysis_report.json");
    if (!rf) throw IoError("cannot write analysis report");
    rf << report.dump(2) << "\n";
    return res;
}

} // namespace qrng
