#include <doctest.h>

#include <cmath>
#include <string>

#include "qrng/config.hpp"
#include "qrng/errors.hpp"

using namespace qrng;

namespace {

std::string channel_block(int id, double center_mhz, const std::string& extra = "") {
    return "[channel." + std::to_string(id) + "]\n" +
           "center_freq_hz = " + std::to_string(center_mhz) + "e6\n" +
           "lpf_cutoff_hz = 120e6\n"
           "internal_rate_hz = 2.4e9\n"
           "sigma_q = 1.0\n"
           "sigma_e = 0.1\n"
           "n_bits = 16\n"
           "range_r = 1.0\n"
           "h_min = 14.2\n" +
           extra;
}

} // namespace

TEST_CASE("shipped sample config matches the built-in defaults") {
    const RunConfig file = parse_config_file(std::string(QRNG_SOURCE_DIR) +
                                             "/configs/default.toml");
    const RunConfig builtin = default_run_config();
    CHECK(file.seed == builtin.seed);
    CHECK(file.epsilon_log2 == builtin.epsilon_log2);
    CHECK(file.k_sigma == builtin.k_sigma);
    CHECK(file.n_in_bits == builtin.n_in_bits);
    CHECK(file.n_samples == builtin.n_samples);
    REQUIRE(file.channels.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(file.channels[i].id == builtin.channels[i].id);
        CHECK(file.channels[i].chan.center_freq_hz ==
              builtin.channels[i].chan.center_freq_hz);
        CHECK(file.channels[i].chan.gain == builtin.channels[i].chan.gain);
        CHECK(file.channels[i].noise.sigma_e == builtin.channels[i].noise.sigma_e);
        CHECK(file.channels[i].h_min == builtin.channels[i].h_min);
        CHECK(file.channels[i].quant.n_bits == 16);
    }
}

TEST_CASE("overlapping sideband ranges are rejected with a precise message") {
    const std::string text = "[global]\nseed = 7\n" + channel_block(1, 600) +
                             channel_block(2, 650);
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("overlap"),
                         ConfigError);
}

TEST_CASE("duplicate center frequencies are rejected") {
    const std::string text = channel_block(1, 200) + channel_block(2, 200);
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("distinct"),
                         ConfigError);
}

TEST_CASE("non-overlapping three-channel setup validates") {
    const std::string text =
        channel_block(1, 200) + channel_block(2, 600) + channel_block(3, 1000);
    const RunConfig cfg = parse_config_text(text);
    CHECK(cfg.channels.size() == 3);
    CHECK(cfg.epsilon() == doctest::Approx(std::exp2(-50)));
}

TEST_CASE("unknown generator names are rejected") {
    const std::string text = "[global]\nprng = \"mt19937\"\n" + channel_block(1, 200);
    CHECK_THROWS_WITH_AS(parse_config_text(text), doctest::Contains("philox4x32-10"),
                         ConfigError);
}

TEST_CASE("config errors carry section and key") {
    CHECK_THROWS_WITH_AS(parse_config_text(channel_block(1, 200) + "junk line\n"),
                         doctest::Contains("key = value"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_config_text("[channel.1]\ncenter_freq_hz = fast\n"),
        doctest::Contains("center_freq_hz"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text(""), doctest::Contains("channel"),
                         ConfigError);
}

TEST_CASE("hex and decimal seeds parse") {
    const std::string base = channel_block(1, 200);
    CHECK(parse_config_text("[global]\nseed = \"0xDEADBEEF\"\n" + base).seed ==
          0xDEADBEEFull);
    CHECK(parse_config_text("[global]\nseed = 12345\n" + base).seed == 12345ull);
}

TEST_CASE("auto h_min resolves through the filter chain") {
    const std::string text = channel_block(1, 200, "");
    RunConfig cfg = parse_config_text(
        "[global]\nk_sigma = 5.0\n" +
        channel_block(1, 200).substr(0, std::string::npos));
    // replace the numeric h_min with auto
    std::string auto_text = "[global]\nk_sigma = 5.0\n" + channel_block(1, 200);
    auto_text.replace(auto_text.find("h_min = 14.2"), 12, "h_min = auto");
    const RunConfig resolved = parse_config_text(auto_text);
    CHECK(resolved.channels[0].h_min_auto);
    CHECK(resolved.channels[0].h_min > 10.0);
    CHECK(resolved.channels[0].h_min < 16.0);
}

TEST_CASE("config invariant failures name the channel") {
    std::string bad = channel_block(1, 200);
    bad.replace(bad.find("range_r = 1.0"), 13, "range_r = -1.0");
    CHECK_THROWS_WITH_AS(parse_config_text(bad), doctest::Contains("channel.1"),
                         ConfigError);
}
