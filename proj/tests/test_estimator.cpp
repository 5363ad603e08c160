#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "swsense/agc.hpp"
#include "swsense/error.hpp"
#include "swsense/estimator.hpp"

using namespace swsense;

namespace {

const CalibrationTable& default_table() {
    static const CalibrationTable t = build_calibration(ChainConfig{});
    return t;
}

TapCodes settled_codes(double f, double p) {
    const ChainConfig c;
    const std::vector<SpectralLine> lines{{f, dbm_to_watts(p)}};
    return settle_agc(lines, c, default_table().agc_window()).codes;
}

}  // namespace

TEST(Resolution, EightOfSixteenGHz) {
    // Oracle: dV / [(A pi / (2 ln10 f_max)) tan(pi f / 2 f_max)] with tan(pi/4) = 1.
    const double expected = (1.398 / 4096.0) / (0.4 * std::numbers::pi / (2.0 * std::log(10.0) * 16e9));
    const double r = resolution(Frequency::ghz(8), Frequency::ghz(16), DetectorParams{}, AdcParams{});
    EXPECT_NEAR(r, expected, 1e-3);
    EXPECT_NEAR(r, 20.01e6, 0.01e6);
    EXPECT_NEAR(r / 8e9, 0.0025, 0.0001);
}

TEST(Resolution, ImprovesTowardFmax) {
    double prev = 1e30;
    for (double f = 1e9; f < 16e9; f += 1e9) {
        const double r = resolution(Frequency(f), Frequency::ghz(16), DetectorParams{}, AdcParams{});
        EXPECT_LT(r, prev);
        prev = r;
    }
    EXPECT_THROW(resolution(Frequency::ghz(16), Frequency::ghz(16), DetectorParams{}, AdcParams{}),
                 std::invalid_argument);
}

TEST(PlaceNodes, SixteenGHzQuarterPercent) {
    const auto p = place_nodes(Frequency::ghz(16), 0.0025, DetectorParams{}, AdcParams{});
    EXPECT_NEAR(p.f_max_2.hz(), 8.0e9, 50e6);
    EXPECT_GE(p.f_min.hz(), 3.6e9);
    EXPECT_LE(p.f_min.hz(), 4.2e9);
}

TEST(PlaceNodes, InfeasibleTarget) {
    // Relative resolution only reaches ~1e-12 at the bisection's upper bracket.
    EXPECT_THROW(place_nodes(Frequency::ghz(16), 1e-13, DetectorParams{}, AdcParams{}),
                 PlacementInfeasibleError);
    EXPECT_THROW(place_nodes(Frequency::ghz(16), 0.0, DetectorParams{}, AdcParams{}),
                 PlacementInfeasibleError);
}

TEST(Calibration, TableIsComplete) {
    const auto& t = default_table();
    EXPECT_EQ(t.freq_grid().size(), 151u);
    EXPECT_EQ(t.power_grid().size(), 41u);
    EXPECT_EQ(t.cells().size(), 151u * 41u);
    EXPECT_EQ(t.config_hash().size(), 16u);
}

TEST(Calibration, RejectsGridBeyondBijectiveLimit) {
    GridSpec g;
    g.f_stop = 17e9;
    EXPECT_THROW(build_calibration(ChainConfig{}, g), CalibrationRangeError);
}

TEST(Calibration, RejectsUnrepresentablePower) {
    GridSpec g;
    g.p_start = -60.0;
    EXPECT_THROW(build_calibration(ChainConfig{}, g), CalibrationRangeError);
}

TEST(Calibration, CouplerGridMustStayInBand) {
    ChainConfig c;
    c.coupling_kind = CouplingKind::coupler;
    EXPECT_THROW(build_calibration(c), CalibrationRangeError);
    GridSpec g;
    g.f_stop = 14e9;
    EXPECT_NO_THROW(build_calibration(c, g));
}

TEST(Estimator, GridRoundTrip) {
    const auto& t = default_table();
    for (std::size_t i = 0; i < t.freq_grid().size(); ++i) {
        for (std::size_t k = 0; k < t.power_grid().size(); ++k) {
            const auto& c = t.cell(i, k);
            const TapCodes codes{c.code_oc, c.code_l1, c.code_l2, c.att_db, 0.0};
            const auto e = estimate(codes, t);
            const double f = t.freq_grid()[i];
            EXPECT_NEAR(e.power.dbm(), t.power_grid()[k], 1e-6) << f << " " << t.power_grid()[k];
            // Near f_max the tap drops under the detector floor: the reading
            // only bounds f from below and must say so.
            const int tap = e.tap_used == TapId::l1 ? c.code_l1 : c.code_l2;
            if (tap <= detector_floor_code(ChainConfig{})) {
                EXPECT_EQ(e.confidence, Confidence::saturated) << f;
                EXPECT_LE(e.freq.hz(), f + 1e3) << f;
            } else {
                EXPECT_NEAR(e.freq.hz(), f, 1e3) << f << " " << t.power_grid()[k];
            }
        }
    }
}

TEST(Estimator, SwitchesToL2BelowFiveGHz) {
    const auto& t = default_table();
    for (double f : {1.2e9, 2.5e9, 4.9e9}) {
        const auto e = estimate(settled_codes(f, 0.0), t);
        EXPECT_EQ(e.tap_used, TapId::l2) << f;
        EXPECT_LT(e.freq.hz(), 5e9);
    }
    for (double f : {5.1e9, 8e9, 15e9}) {
        const auto e = estimate(settled_codes(f, 0.0), t);
        EXPECT_EQ(e.tap_used, TapId::l1) << f;
        EXPECT_GE(e.freq.hz(), 5e9);
    }
}

TEST(Estimator, OffGridAccuracy) {
    const auto& t = default_table();
    const ChainConfig c;
    for (double f = 1.25e9; f < 15.9e9; f += 0.5e9) {
        for (double p = -19.5; p < 20.0; p += 3.0) {
            const auto e = estimate(settled_codes(f, p), t);
            if (e.confidence == Confidence::saturated) {
                EXPECT_GT(f, 15e9) << p;
                continue;
            }
            const double fmax = f < 5e9 ? 5e9 : 16e9;
            const double res = resolution(Frequency(f), Frequency(fmax), c.detector, c.adc);
            EXPECT_LE(std::abs(e.freq.hz() - f), res + 0.1e9) << f << " " << p;
            EXPECT_LE(std::abs(e.power.dbm() - p), 1.0) << f << " " << p;
        }
    }
}

TEST(Estimator, ClosedFormMatchesCosineLaw) {
    const auto& t = default_table();
    const ChainConfig c;
    const auto codes = settled_codes(8e9, 0.0);
    const double f = closed_form_frequency(codes.code_l1, codes.code_oc, TapId::l1, t, c);
    EXPECT_NEAR(f, 8e9, 0.1e9);
}

TEST(Estimator, NoSignalAtFloor) {
    const auto& t = default_table();
    const int fl = detector_floor_code(ChainConfig{});
    EXPECT_THROW(estimate({fl, fl, fl, 0.0, 0.0}, t), NoSignalError);
}

TEST(Estimator, BothTapsRailedIsIndeterminate) {
    const auto& t = default_table();
    const int fl = detector_floor_code(ChainConfig{});
    EXPECT_THROW(estimate({2000, fl, fl, 0.0, 0.0}, t), IndeterminateFrequencyError);
}

TEST(Estimator, OverrangeWithAttenuatorAtMaximum) {
    const auto& t = default_table();
    const int ceil = detector_ceiling_code(ChainConfig{});
    EXPECT_THROW(estimate_power({ceil, 2000, 2000, 31.75, 0.0}, Frequency::ghz(8), t), PowerOverrangeError);
}

TEST(Estimator, EqualTapAndOpenEndClampsToLowestFrequency) {
    const auto& t = default_table();
    const auto e = estimate({2600, 2600, 2600, 0.0, 0.0}, t);
    EXPECT_EQ(e.confidence, Confidence::clamped);
    EXPECT_DOUBLE_EQ(e.freq.hz(), t.freq_grid().front());
}

TEST(Estimator, ConfidenceStrings) {
    EXPECT_EQ(to_string(Confidence::in_range), "in-range");
    EXPECT_EQ(to_string(Confidence::clamped), "clamped");
    EXPECT_EQ(to_string(Confidence::saturated), "saturated");
    EXPECT_EQ(to_string(TapId::l2), "l2");
}
