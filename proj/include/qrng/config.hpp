#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qrng/entropy.hpp"
#include "qrng/source.hpp"

namespace qrng {

struct ChannelConfig {
    uint32_t id = 0;
    ChannelSpec chan;
    NoiseModel noise;
    QuantizerSpec quant;
    double h_min = 0.0; // planning input, bits/sample (resolved if auto)
    bool h_min_auto = false;
    std::string toeplitz_seed_file; // empty -> derive from the global PRNG seed
};

// Resolved run configuration. All randomness in a run flows from `seed`;
// per-channel substreams are separated by stream/domain words.
struct RunConfig {
    std::string prng_name = "philox4x32-10";
    uint64_t seed = 0x51524e4731u;
    int epsilon_log2 = -50;
    double k_sigma = 5.0;
    uint32_t n_in_bits = 768;

    uint64_t n_samples = 10000000;        // desk scale, per channel
    uint64_t paper_samples = 82600000;    // paper scale, per channel

    uint64_t analysis_bits = 10000000;    // per stream for pair analysis
    int max_lag = 100;
    uint64_t sts_block_len = 100000;
    uint64_t sts_blocks = 100;
    uint64_t paper_sts_block_len = 1000000;
    uint64_t paper_sts_blocks = 1000;
    double sts_alpha = 0.01;

    std::string out_dir = "out";
    std::vector<ChannelConfig> channels;

    double epsilon() const;
    void validate() const; // throws ConfigError naming the violated field
};

RunConfig parse_config_file(const std::filesystem::path& p);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

// The built-in paper-matched three-channel setup (mirrors configs/default.toml).
RunConfig default_run_config();

// Resolve "auto" h_min entries against the effective post-chain noise model.
void resolve_auto_h_min(RunConfig& cfg);

} // namespace qrng
