#include "qrng/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "qrng/errors.hpp"

namespace qrng {

double RunConfig::epsilon() const {
    return std::exp2(static_cast<double>(epsilon_log2));
}

namespace {

struct RawConfig {
    // section -> key -> raw value text
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string origin;

    bool has(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        return s != sections.end() && s->second.count(key) > 0;
    }

    const std::string& raw(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        if (s == sections.end() || !s->second.count(key))
            throw ConfigError(origin + ": missing [" + sec + "] " + key);
        return s->second.at(key);
    }

    std::string get_string(const std::string& sec, const std::string& key) const {
        std::string v = raw(sec, key);
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
            return v.substr(1, v.size() - 2);
        return v;
    }

    double get_double(const std::string& sec, const std::string& key) const {
        const std::string v = get_string(sec, key);
        char* end = nullptr;
        const double d = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0')
            throw ConfigError(origin + ": [" + sec + "] " + key + ": not a number: " + v);
        return d;
    }

    uint64_t get_u64(const std::string& sec, const std::string& key) const {
        const std::string v = get_string(sec, key);
        if (v.rfind("0x", 0) == 0 || v.rfind("0X", 0) == 0) {
            char* end = nullptr;
            const uint64_t u = std::strtoull(v.c_str(), &end, 16);
            if (end == v.c_str() || *end != '\0')
                throw ConfigError(origin + ": [" + sec + "] " + key + ": bad hex: " + v);
            return u;
        }
        const double d = get_double(sec, key);
        if (d < 0 || std::floor(d) != d || d > 1.8e19)
            throw ConfigError(origin + ": [" + sec + "] " + key + ": not a non-negative integer: " + v);
        return static_cast<uint64_t>(d);
    }

    int64_t get_i64(const std::string& sec, const std::string& key) const {
        const double d = get_double(sec, key);
        if (std::floor(d) != d)
            throw ConfigError(origin + ": [" + sec + "] " + key + ": not an integer");
        return static_cast<int64_t>(d);
    }
};

std::string strip(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

RawConfig parse_raw(const std::string& text, const std::string& origin) {
    RawConfig rc;
    rc.origin = origin;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            else if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
            section = strip(line.substr(1, line.size() - 2));
            rc.sections[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = strip(line.substr(0, eq));
        const std::string val = strip(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        rc.sections[section][key] = val;
    }
    return rc;
}

ChannelConfig parse_channel(const RawConfig& rc, const std::string& sec, uint32_t id) {
    ChannelConfig cc;
    cc.id = id;
    cc.chan.id = id;
    cc.chan.center_freq_hz = rc.get_double(sec, "center_freq_hz");
    cc.chan.rf_freq_hz = rc.has(sec, "rf_freq_hz") ? rc.get_double(sec, "rf_freq_hz")
                                                   : cc.chan.center_freq_hz;
    cc.chan.lpf_cutoff_hz = rc.get_double(sec, "lpf_cutoff_hz");
    cc.chan.f_s_out_hz = rc.has(sec, "f_s_out_hz") ? rc.get_double(sec, "f_s_out_hz")
                                                   : 2.0 * cc.chan.lpf_cutoff_hz;
    cc.chan.internal_rate_hz = rc.get_double(sec, "internal_rate_hz");
    cc.chan.gain = rc.has(sec, "gain") ? rc.get_double(sec, "gain") : 1.0;
    if (rc.has(sec, "fir_taps"))
        cc.chan.filter.tap_count = static_cast<unsigned>(rc.get_u64(sec, "fir_taps"));
    cc.chan.filter.cutoff_hz = cc.chan.lpf_cutoff_hz;
    if (rc.has(sec, "fir_stopband_db"))
        cc.chan.filter.stopband_atten_db = rc.get_double(sec, "fir_stopband_db");

    cc.noise.sigma_q = rc.get_double(sec, "sigma_q");
    cc.noise.sigma_e = rc.get_double(sec, "sigma_e");
    cc.quant.n_bits = static_cast<unsigned>(rc.get_u64(sec, "n_bits"));
    cc.quant.range_r = rc.get_double(sec, "range_r");

    const std::string h = rc.get_string(sec, "h_min");
    if (h == "auto") {
        cc.h_min_auto = true;
    } else {
        cc.h_min = rc.get_double(sec, "h_min");
    }
    if (rc.has(sec, "toeplitz_seed_file"))
        cc.toeplitz_seed_file = rc.get_string(sec, "toeplitz_seed_file");
    return cc;
}

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    const RawConfig rc = parse_raw(text, origin);
    RunConfig cfg;
    const std::string g = "global";
    if (rc.has(g, "prng")) cfg.prng_name = rc.get_string(g, "prng");
    if (rc.has(g, "seed")) cfg.seed = rc.get_u64(g, "seed");
    if (rc.has(g, "epsilon_log2"))
        cfg.epsilon_log2 = static_cast<int>(rc.get_i64(g, "epsilon_log2"));
    if (rc.has(g, "k_sigma")) cfg.k_sigma = rc.get_double(g, "k_sigma");
    if (rc.has(g, "n_in_bits")) cfg.n_in_bits = static_cast<uint32_t>(rc.get_u64(g, "n_in_bits"));
    if (rc.has(g, "n_samples")) cfg.n_samples = rc.get_u64(g, "n_samples");
    if (rc.has(g, "paper_samples")) cfg.paper_samples = rc.get_u64(g, "paper_samples");
    if (rc.has(g, "analysis_bits")) cfg.analysis_bits = rc.get_u64(g, "analysis_bits");
    if (rc.has(g, "max_lag")) cfg.max_lag = static_cast<int>(rc.get_u64(g, "max_lag"));
    if (rc.has(g, "sts_block_len")) cfg.sts_block_len = rc.get_u64(g, "sts_block_len");
    if (rc.has(g, "sts_blocks")) cfg.sts_blocks = rc.get_u64(g, "sts_blocks");
    if (rc.has(g, "paper_sts_block_len"))
        cfg.paper_sts_block_len = rc.get_u64(g, "paper_sts_block_len");
    if (rc.has(g, "paper_sts_blocks")) cfg.paper_sts_blocks = rc.get_u64(g, "paper_sts_blocks");
    if (rc.has(g, "sts_alpha")) cfg.sts_alpha = rc.get_double(g, "sts_alpha");
    if (rc.has(g, "out_dir")) cfg.out_dir = rc.get_string(g, "out_dir");

    for (const auto& [sec, kv] : rc.sections) {
        if (sec.rfind("channel.", 0) != 0) continue;
        const std::string idstr = sec.substr(8);
        char* end = nullptr;
        const unsigned long id = std::strtoul(idstr.c_str(), &end, 10);
        if (end == idstr.c_str() || *end != '\0' || id == 0)
            throw ConfigError(origin + ": bad channel section [" + sec + "]");
        cfg.channels.push_back(parse_channel(rc, sec, static_cast<uint32_t>(id)));
    }
    std::sort(cfg.channels.begin(), cfg.channels.end(),
              [](const ChannelConfig& a, const ChannelConfig& b) { return a.id < b.id; });
    cfg.validate();
    resolve_auto_h_min(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) throw IoError("cannot open config: " + p.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), p.string());
}

void RunConfig::validate() const {
    const auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
    if (prng_name != "philox4x32-10")
        fail("global.prng: unknown generator '" + prng_name + "' (supported: philox4x32-10)");
    if (epsilon_log2 >= 0) fail("global.epsilon_log2: must be negative");
    if (!(k_sigma >= 0.0)) fail("global.k_sigma: must be non-negative");
    if (channels.empty()) fail("no [channel.N] sections");
    if (!(sts_alpha > 0.0 && sts_alpha < 1.0)) fail("global.sts_alpha: must lie in (0,1)");
    if (max_lag < 0) fail("global.max_lag: must be non-negative");

    for (const auto& cc : channels) {
        const std::string pfx = "channel." + std::to_string(cc.id) + ": ";
        try {
            cc.chan.validate();
            cc.noise.validate();
            cc.quant.validate();
        } catch (const std::exception& e) {
            fail(pfx + e.what());
        }
        if (n_in_bits % cc.quant.n_bits != 0)
            fail(pfx + "global.n_in_bits (" + std::to_string(n_in_bits) +
                 ") must be divisible by n_bits (" + std::to_string(cc.quant.n_bits) + ")");
        if (!cc.h_min_auto && (!(cc.h_min > 0.0) || cc.h_min > cc.quant.n_bits))
            fail(pfx + "h_min must lie in (0, n_bits]");
    }

    // Pairwise-distinct centers with non-overlapping [fc - W, fc + W] bands.
    std::vector<const ChannelConfig*> by_freq;
    for (const auto& cc : channels) by_freq.push_back(&cc);
    std::sort(by_freq.begin(), by_freq.end(), [](auto* a, auto* b) {
        return a->chan.center_freq_hz < b->chan.center_freq_hz;
    });
    for (size_t i = 0; i + 1 < by_freq.size(); ++i) {
        const auto& a = by_freq[i]->chan;
        const auto& b = by_freq[i + 1]->chan;
        if (a.center_freq_hz == b.center_freq_hz)
            throw ConfigError("config: channels " + std::to_string(by_freq[i]->id) + " and " +
                              std::to_string(by_freq[i + 1]->id) +
                              ": center frequencies must be pairwise distinct");
        const double a_hi = a.center_freq_hz + a.lpf_cutoff_hz;
        const double b_lo = b.center_freq_hz - b.lpf_cutoff_hz;
        if (b_lo < a_hi)
            throw ConfigError(
                "config: channels " + std::to_string(by_freq[i]->id) + " and " +
                std::to_string(by_freq[i + 1]->id) + ": sideband ranges [" +
                std::to_string(a.center_freq_hz - a.lpf_cutoff_hz) + ", " + std::to_string(a_hi) +
                "] and [" + std::to_string(b_lo) + ", " +
                std::to_string(b.center_freq_hz + b.lpf_cutoff_hz) + "] Hz overlap");
    }
}

void resolve_auto_h_min(RunConfig& cfg) {
    for (auto& cc : cfg.channels) {
        if (!cc.h_min_auto) continue;
        const auto taps = design_lowpass(cc.chan.filter, cc.chan.internal_rate_hz);
        const double s = chain_sigma_scale(cc.chan, taps);
        NoiseModel post{cc.noise.sigma_q * s, cc.noise.sigma_e * s};
        cc.h_min = estimate_min_entropy(post, cc.quant, cfg.k_sigma).h_min;
    }
}

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.seed = 0x51524e4731u;
    const double centers[3] = {200.0e6, 600.0e6, 1000.0e6};
    const double sigma_e[3] = {0.100, 0.158, 0.224}; // QCNR 20 / 16 / 13 dB
    const double gain[3] = {1.000, 0.980, 0.945};
    const double h_min[3] = {14.2, 13.5, 12.9};
    for (int i = 0; i < 3; ++i) {
        ChannelConfig cc;
        cc.id = static_cast<uint32_t>(i + 1);
        cc.chan.id = cc.id;
        cc.chan.center_freq_hz = centers[i];
        cc.chan.rf_freq_hz = centers[i];
        cc.chan.lpf_cutoff_hz = 120.0e6;
        cc.chan.f_s_out_hz = 240.0e6;
        cc.chan.internal_rate_hz = 2.4e9;
        cc.chan.gain = gain[i];
        cc.noise.sigma_q = 1.0;
        cc.noise.sigma_e = sigma_e[i];
        cc.quant.n_bits = 16;
        cc.quant.range_r = 1.0;
        cc.h_min = h_min[i];
        cfg.channels.push_back(cc);
    }
    cfg.validate();
    return cfg;
}

} // namespace qrng
