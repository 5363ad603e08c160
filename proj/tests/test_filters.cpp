#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swsense/error.hpp"
#include "swsense/filters.hpp"

using namespace swsense;

namespace {

FilterState engaged_at(double f) { return {true, f, 0.0}; }

}  // namespace

TEST(Notch, KindDefaults) {
    const auto e = NotchModel::defaults(NotchKind::evanescent_pin);
    EXPECT_DOUBLE_EQ(e.depth_db, 30.0);
    EXPECT_DOUBLE_EQ(e.tuning_time, 50e-9);
    const auto y = NotchModel::defaults(NotchKind::yig);
    EXPECT_DOUBLE_EQ(y.depth_db, 40.0);
    EXPECT_DOUBLE_EQ(y.tuning_time, 100e-6);
    EXPECT_DOUBLE_EQ(NotchModel::defaults(NotchKind::ideal).tuning_time, 0.0);
    EXPECT_EQ(notch_kind_from_string("yig"), NotchKind::yig);
    EXPECT_THROW(notch_kind_from_string("cavity"), ConfigError);
}

TEST(Notch, CentreDepthAndHalfDepthWidth) {
    const NotchModel m;
    const auto st = engaged_at(6e9);
    EXPECT_NEAR(notch_s21_db(m, st, Frequency(6e9), PowerLevel(0.0), 1.0), -30.0, 1e-12);
    EXPECT_NEAR(notch_s21_db(m, st, Frequency(6e9 + m.bw_3db / 2), PowerLevel(0.0), 1.0), -15.0, 1e-9);
    EXPECT_GT(notch_s21_db(m, st, Frequency(7e9), PowerLevel(0.0), 1.0), -0.1);
}

TEST(Notch, DisengagedOrTransitioningPassesEverything) {
    const NotchModel m;
    EXPECT_DOUBLE_EQ(notch_s21_db(m, FilterState{}, Frequency(6e9), PowerLevel(0.0), 1.0), 0.0);
    const auto st = tune(m, FilterState{}, Frequency(6e9), 1e-6);
    EXPECT_DOUBLE_EQ(notch_s21_db(m, st, Frequency(6e9), PowerLevel(0.0), 1.0e-6 + 49e-9), 0.0);
    EXPECT_LT(notch_s21_db(m, st, Frequency(6e9), PowerLevel(0.0), 1.0e-6 + 50e-9), -29.0);
}

TEST(Notch, YigEffectiveAfterTuningTime) {
    const auto m = NotchModel::defaults(NotchKind::yig);
    const auto st = tune(m, FilterState{}, Frequency(6e9), 0.0);
    EXPECT_FALSE(st.effective_at(99e-6));
    EXPECT_TRUE(st.effective_at(100e-6));
}

TEST(Notch, EvanescentDepthDegradesAboveKnee) {
    const NotchModel m;
    EXPECT_DOUBLE_EQ(effective_depth_db(m, PowerLevel(10.0)), 30.0);
    EXPECT_DOUBLE_EQ(effective_depth_db(m, PowerLevel(20.0)), 15.0);
    EXPECT_DOUBLE_EQ(effective_depth_db(m, PowerLevel(40.0)), 3.0);
    EXPECT_NEAR(notch_s21_db(m, engaged_at(6e9), Frequency(6e9), PowerLevel(20.0), 1.0), -15.0, 1e-12);
    // Other kinds hold their depth.
    EXPECT_DOUBLE_EQ(effective_depth_db(NotchModel::defaults(NotchKind::yig), PowerLevel(30.0)), 40.0);
}

TEST(Notch, SuppressionNonIncreasingWithInputPower) {
    const NotchModel m;
    double prev = 1e9;
    for (double p = -20.0; p <= 40.0; p += 0.25) {
        const double s = -notch_s21_db(m, engaged_at(6e9), Frequency(6e9), PowerLevel(p), 1.0);
        EXPECT_LE(s, prev);
        prev = s;
    }
}

TEST(Notch, ReflectionAtThreeDbPoint) {
    NotchModel m = NotchModel::defaults(NotchKind::ideal);
    m.depth_db = 10.0 * std::log10(2.0);
    EXPECT_NEAR(stopband_gamma(m, engaged_at(6e9), Frequency(6e9), PowerLevel(0.0), 1.0), std::sqrt(0.5), 1e-12);
    m.reflective = false;
    EXPECT_DOUBLE_EQ(stopband_gamma(m, engaged_at(6e9), Frequency(6e9), PowerLevel(0.0), 1.0), 0.0);
}

TEST(Notch, LosslessEnergyBalance) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> f(5.5e9, 6.5e9), p(-20.0, 30.0);
    for (auto kind : {NotchKind::evanescent_pin, NotchKind::yig, NotchKind::ideal}) {
        const auto m = NotchModel::defaults(kind);
        const auto st = engaged_at(6e9);
        for (int i = 0; i < 500; ++i) {
            const Frequency ff(f(rng));
            const PowerLevel pp(p(rng));
            const double s21 = std::pow(10.0, notch_s21_db(m, st, ff, pp, 1.0) / 10.0);
            const double g = stopband_gamma(m, st, ff, pp, 1.0);
            EXPECT_NEAR(s21 + g * g, 1.0, 1e-12);
        }
    }
}

TEST(Notch, TuneRangeAndRelease) {
    const NotchModel m;
    EXPECT_THROW(tune(m, FilterState{}, Frequency(17e9), 0.0), TuningRangeError);
    const auto st = tune(m, FilterState{}, Frequency(8e9), 0.0);
    EXPECT_TRUE(st.engaged);
    EXPECT_DOUBLE_EQ(st.f_center, 8e9);
    const auto r = release(st);
    EXPECT_FALSE(r.engaged);
    EXPECT_FALSE(r.effective_at(1.0));
}

TEST(Notch, ValidateRejectsNonPositiveDepth) {
    NotchModel m;
    m.depth_db = 0.0;
    EXPECT_THROW(m.validate(), ConfigError);
}
