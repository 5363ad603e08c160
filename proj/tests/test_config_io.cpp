#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "swsense/config_io.hpp"
#include "swsense/error.hpp"

using namespace swsense;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("swsense_cfg_" + name);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(ConfigIo, ChainRoundTrip) {
    ChainConfig c;
    c.coupling_kind = CouplingKind::coupler;
    c.tap.r_c = 210.0;
    c.coupler.directivity_db = FrequencyTable({{1e9, 10.0}, {14e9, 6.0}});
    c.gain_ripple_db = FrequencyTable({{1e9, 0.5}, {16e9, -0.5}});
    c.adc.bits = 10;
    EXPECT_EQ(chain_from_json(to_json(c)), c);
    EXPECT_EQ(chain_from_json(to_json(ChainConfig{})), ChainConfig{});
}

TEST(ConfigIo, PartialDocumentsKeepDefaults) {
    const auto c = chain_from_json(Json::parse(R"({"tap": {"r_c": 100}})"));
    EXPECT_DOUBLE_EQ(c.tap.r_c, 100.0);
    EXPECT_DOUBLE_EQ(c.adc.v_fs, 1.398);
}

TEST(ConfigIo, UnknownFieldsAreRejected) {
    EXPECT_THROW(chain_from_json(Json::parse(R"({"tapp": {}})")), ConfigError);
    EXPECT_THROW(chain_from_json(Json::parse(R"({"adc": {"bitz": 3}})")), ConfigError);
    EXPECT_THROW(controller_from_json(Json::parse(R"({"threshhold": 3})")), ConfigError);
}

TEST(ConfigIo, InvalidValuesAreRejected) {
    EXPECT_THROW(chain_from_json(Json::parse(R"({"adc": {"bits": 20}})")), ConfigError);
    EXPECT_THROW(chain_from_json(Json::parse(R"({"adc": {"bits": "twelve"}})")), ConfigError);
    EXPECT_THROW(chain_from_json(Json::parse(R"({"coupling_kind": "loop"})")), ConfigError);
    EXPECT_THROW(chain_from_json(Json::parse(R"({"gain_ripple_db": [[2e9, 0], [1e9, 1]]})")), ConfigError);
}

TEST(ConfigIo, ControllerNotchGridToneRoundTrip) {
    ControllerConfig cc;
    cc.threshold = PowerLevel(-7.5);
    cc.agc_high_code = 2600;
    cc.agc_low_code = 2500;
    EXPECT_EQ(controller_from_json(to_json(cc)), cc);

    auto m = NotchModel::defaults(NotchKind::yig);
    m.depth_db = 60.0;
    EXPECT_EQ(notch_from_json(to_json(m)), m);

    GridSpec g{2e9, 4e9, 0.5e9, -10, 10, 2};
    EXPECT_EQ(grid_from_json(to_json(g)), g);

    Tone t;
    t.freq = Frequency::ghz(3);
    t.power = PowerLevel(-3);
    t.occupied_bw = 12e6;
    t.n_subtones = 11;
    const Tone back = tone_from_json(to_json(t));
    EXPECT_EQ(back.freq, t.freq);
    EXPECT_EQ(back.n_subtones, 11);
}

TEST(ConfigIo, NotchDefaultsFollowKind) {
    const auto m = notch_from_json(Json::parse(R"({"kind": "yig"})"));
    EXPECT_DOUBLE_EQ(m.depth_db, 40.0);
    EXPECT_DOUBLE_EQ(m.tuning_time, 100e-6);
    EXPECT_DOUBLE_EQ(m.f_tune_min, 2e9);
}

TEST(ConfigIo, ModulatedToneGetsDefaultLineCount) {
    const auto t = tone_from_json(Json::parse(R"({"freq": 6e9, "power": 0, "occupied_bw": 12e6})"));
    EXPECT_EQ(t.n_subtones, 31);
    EXPECT_THROW(tone_from_json(Json::parse(R"({"freq": 6e9})")), ConfigError);
    EXPECT_THROW(tone_from_json(Json::parse(R"({"freq": -6e9, "power": 0})")), ConfigError);
    EXPECT_THROW(tone_from_json(Json::parse(R"({"freq": 6e9, "power": 0, "t_on": 2, "t_off": 1})")),
                 ConfigError);
}

TEST(ConfigIo, HashIsStableAndSensitive) {
    const ChainConfig a;
    ChainConfig b;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.detector.slope_a = 0.41;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(ConfigIo, BundledDefaultConfigMatchesBuiltInDefaults) {
    const auto c = load_app_config(std::string(SWSENSE_DATA_DIR) + "/default_config.json");
    EXPECT_EQ(c.chain, ChainConfig{});
    EXPECT_EQ(c.controller, ControllerConfig{});
    EXPECT_EQ(c.calibration_grid, GridSpec{});
    EXPECT_EQ(c.package_limits_w, kDefaultPackageLimitsW);
}

TEST(ConfigIo, AppConfigRejectsBadPackageLimit) {
    EXPECT_THROW(app_config_from_json(Json::parse(R"({"package_limits_w": [0.1, -1]})")), ConfigError);
    EXPECT_THROW(read_json_file("/nonexistent/config.json"), ConfigError);
}

TEST(ConfigIo, CalibrationPersistenceRoundTrip) {
    const auto dir = scratch("cal");
    const ChainConfig chain;
    const GridSpec g{1e9, 3e9, 0.5e9, -10, 10, 5};
    const auto cal = build_calibration(chain, g);
    save_calibration(cal, (dir / "cal.csv").string(), (dir / "cal.json").string());

    std::ifstream in(dir / "cal.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "freq_hz,power_dbm,att_db,code_oc,code_l1,code_l2");

    const auto back = load_calibration((dir / "cal.csv").string(), (dir / "cal.json").string(), chain);
    EXPECT_EQ(back.freq_grid(), cal.freq_grid());
    EXPECT_EQ(back.power_grid(), cal.power_grid());
    EXPECT_EQ(back.cells(), cal.cells());
    EXPECT_EQ(back.d_const(), cal.d_const());
    EXPECT_EQ(back.agc_window(), cal.agc_window());

    ChainConfig other;
    other.tap.r_c = 100.0;
    EXPECT_THROW(load_calibration((dir / "cal.csv").string(), (dir / "cal.json").string(), other),
                 ConfigError);
}
