#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qrng/analysis.hpp"
#include "qrng/config.hpp"
#include "qrng/sts.hpp"
#include "qrng/toeplitz.hpp"

namespace qrng {

struct PipelineOptions {
    bool paper_scale = false;
    bool ascii = false;                  // bit files as '0'/'1' text
    std::vector<uint32_t> channel_ids;   // empty = all configured channels
    uint64_t samples_override = 0;       // 0 = scale default
};

// In-memory result of one channel: simulate -> pack -> extract.
struct ChannelData {
    uint32_t id = 0;
    ExtractionPlan plan;
    ToeplitzSpec toeplitz;
    RawSampleBlock raw;
    BitStream extracted;
    uint64_t blocks = 0;
    uint64_t discarded_tail_bits = 0;
    double expected_off_scale = 0.0; // fraction
    double off_scale_sd = 0.0;       // binomial SD of the fraction
    bool off_scale_ok = false;
    double sim_seconds = 0.0;
    double extract_seconds = 0.0;
};

ChannelData produce_channel(const RunConfig& cfg, const ChannelConfig& cc,
                            uint64_t n_samples);

// Round-robin block interleave in channel order; de-interleaving with the
// per-channel (m, blocks) bookkeeping recovers each stream exactly.
BitStream interleave_blocks(const std::vector<const BitStream*>& streams,
                            const std::vector<uint32_t>& block_bits);
std::vector<BitStream> deinterleave_blocks(const BitStream& cumulative,
                                           const std::vector<uint32_t>& block_bits,
                                           uint64_t blocks_per_channel);

struct RunResult {
    std::vector<ChannelData> channels;
    uint64_t cumulative_bits = 0;
    std::filesystem::path manifest_path;
};

// Full cmd_run: writes per-channel raw + bit files, the interleaved
// cumulative stream, manifest.json (deterministic) and run_log.json
// (timings and throughput, intentionally outside the manifest).
RunResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& out_dir,
                       const PipelineOptions& opt = {});

// Plan table data for cmd_plan.
struct PlanRow {
    uint32_t id = 0;
    double center_freq_hz = 0.0;
    double h_min = 0.0;
    ExtractionPlan plan;
    double c_max = 0.0;
    int64_t rate_hundredths = 0; // Gbps * 100, exact presentation rounding
};

struct PlanTable {
    std::vector<PlanRow> rows;
    int64_t cumulative_hundredths = 0;
};

PlanTable make_plan_table(const RunConfig& cfg);

// Analysis driver for cmd_analyze over a finished run directory.
struct AnalysisResult {
    std::vector<CorrelationReport> pairs;
    std::vector<TestReport> sts_per_channel; // channel order
    std::vector<double> empirical_h;         // per channel, raw codes
    std::vector<double> byte_chi2_p;         // per channel, extracted bytes
    std::vector<double> xor_monobit_p;       // per pair, 64x64 XOR maps
    bool all_pass = false;
};

AnalysisResult analyze_run(const RunConfig& cfg, const std::filesystem::path& run_dir,
                           bool paper_scale, const std::filesystem::path& report_dir);

} // namespace qrng
