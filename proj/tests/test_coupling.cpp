#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "swsense/coupling.hpp"
#include "swsense/error.hpp"

using namespace swsense;

namespace {

// Independent nodal solution of the shunt tap: source V_s behind Z0, node V,
// shunt branch R_C + Z0 (monitor port), through load Z0.
struct Nodal {
    double v_node;
    double v_monitor;
    double v_reflected;
    double p_rc;
    double p_incident;
};

Nodal solve(double rc, double z0, double vs) {
    const double g = 1.0 / z0 + 1.0 / z0 + 1.0 / (rc + z0);
    const double v = (vs / z0) / g;
    const double i_branch = v / (rc + z0);
    const double z_in = 1.0 / (1.0 / z0 + 1.0 / (rc + z0));
    const double gamma = (z_in - z0) / (z_in + z0);
    return {v, i_branch * z0, gamma * vs / 2.0, 0.5 * i_branch * i_branch * rc, vs * vs / (8.0 * z0)};
}

}  // namespace

TEST(Coupling, MatchesNodalOracle) {
    for (double rc : {50.0, 100.0, 210.0, 220.0, 470.0, 1000.0}) {
        const ResistiveTapParams p{rc, 50.0};
        const Nodal n = solve(rc, 50.0, 2.0);
        // Incident wave amplitude is V_s/2 = 1.
        EXPECT_NEAR(tap_coupling(p), 20.0 * std::log10(n.v_monitor), 1e-9) << rc;
        const auto s = tap_sparams(p);
        EXPECT_NEAR(s.s21_db, 20.0 * std::log10(n.v_node), 1e-9) << rc;
        EXPECT_NEAR(s.s11_db, 20.0 * std::log10(std::abs(n.v_reflected)), 1e-9) << rc;
        EXPECT_NEAR(tap_dissipation_fraction(p), n.p_rc / n.p_incident, 1e-12) << rc;
    }
}

TEST(Coupling, Rc210Anchor) {
    const ResistiveTapParams p{210.0, 50.0};
    EXPECT_NEAR(tap_coupling(p), -15.1, 0.05);
    const auto s = tap_sparams(p);
    EXPECT_NEAR(s.s11_db, -21.1, 0.05);
    EXPECT_NEAR(s.s21_db, -0.80, 0.01);
}

TEST(Coupling, Rc220Default) {
    const ResistiveTapParams p;
    EXPECT_NEAR(tap_coupling(p), -15.4, 0.05);
    const auto s = tap_sparams(p);
    EXPECT_NEAR(s.s11_db, -21.4, 0.05);
    EXPECT_NEAR(s.s21_db, -0.77, 0.01);
}

TEST(Coupling, DissipationAt20Dbm) {
    EXPECT_NEAR(tap_dissipation(ResistiveTapParams{}, PowerLevel(20.0)), 12.64e-3, 0.01e-3);
}

TEST(Coupling, PackageLimitInvertsDissipation) {
    const ResistiveTapParams p;
    for (double w : kDefaultPackageLimitsW) {
        EXPECT_NEAR(tap_dissipation(p, max_input_for_package(p, w)), w, 1e-12 * w + 1e-15);
    }
    EXPECT_THROW(max_input_for_package(p, 0.0), ConfigError);
}

TEST(Coupling, RejectsBadParameters) {
    EXPECT_THROW(tap_coupling({0.0, 50.0}), ConfigError);
    EXPECT_THROW(tap_coupling({220.0, -1.0}), ConfigError);
}

TEST(Coupler, DefaultsAndBand) {
    const DirectionalCouplerParams c;
    const auto r = coupler_response(c, Frequency::ghz(14.0));
    EXPECT_DOUBLE_EQ(r.coupling_db, -15.0);
    EXPECT_LE(r.insertion_db, 1.6);
    EXPECT_DOUBLE_EQ(r.directivity_db, 6.0);
    EXPECT_THROW(coupler_response(c, Frequency::ghz(15.0)), OutOfBandError);
    EXPECT_THROW(coupler_response(c, Frequency::ghz(0.5)), OutOfBandError);
}

TEST(Coupler, CsvLoad) {
    const auto c = parse_coupler_csv(
        "freq_hz,coupling_db,insertion_db,directivity_db\n"
        "2e9,-14,0.5,10\n"
        "12e9,-16,1.5,8\n");
    EXPECT_DOUBLE_EQ(c.f_min, 2e9);
    EXPECT_DOUBLE_EQ(c.f_max, 12e9);
    EXPECT_NEAR(coupler_response(c, Frequency::ghz(7.0)).coupling_db, -15.0, 1e-12);
    EXPECT_THROW(parse_coupler_csv("freq_hz,coupling_db\n1e9,-10\n"), ConfigError);
    EXPECT_THROW(parse_coupler_csv("freq_hz,coupling_db,insertion_db,directivity_db\n"
                                   "2e9,3,0.5,10\n3e9,3,0.5,10\n"),
                 ConfigError);
}

TEST(Perturbation, NoReflectionIsUnity) {
    EXPECT_DOUBLE_EQ(sampled_forward_amplitude(CouplingKind::tap, {0.0, 0.0}, 1e-9, Frequency::ghz(6)), 1.0);
}

TEST(Perturbation, HalfWaveRoundTripCancelsAtTap) {
    const double f = 6e9;
    const double tau = 1.0 / (4.0 * f);  // round trip phase pi
    EXPECT_NEAR(sampled_forward_amplitude(CouplingKind::tap, {1.0, 0.0}, tau, Frequency(f)), 0.0, 1e-12);
    EXPECT_NEAR(sampled_forward_amplitude(CouplingKind::tap, {1.0, 0.0}, 0.0, Frequency(f)), 2.0, 1e-12);
}

TEST(Perturbation, CouplerDirectivityBoundsTheDip) {
    const double f = 6e9;
    const double tau = 1.0 / (4.0 * f);
    const double leak = std::pow(10.0, -6.0 / 20.0);
    EXPECT_NEAR(sampled_forward_amplitude(CouplingKind::coupler, {1.0, 0.0}, tau, Frequency(f)),
                1.0 - leak, 1e-12);
    ReflectionEnvironment env{[](double) { return std::complex<double>(0.5, 0.0); }, tau};
    EXPECT_NEAR(sampled_forward_amplitude(CouplingKind::tap, env, Frequency(f)), 0.5, 1e-12);
    EXPECT_THROW(sampled_forward_amplitude(CouplingKind::tap, {1.5, 0.0}, 0.0, Frequency(f)), ConfigError);
}
