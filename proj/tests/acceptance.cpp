// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "swsense/agc.hpp"
#include "swsense/coupling.hpp"
#include "swsense/error.hpp"
#include "swsense/estimator.hpp"
#include "swsense/filters.hpp"
#include "swsense/sim.hpp"
#include "swsense/stub.hpp"

using namespace swsense;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void check(Outcome& o, bool cond, const std::string& what) {
    if (!cond) {
        o.pass = false;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += what;
    }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Tone tone(double f, double p, double on = 0.0, double off = 1.0, double bw = 0.0) {
    Tone t;
    t.freq = Frequency(f);
    t.power = PowerLevel(p);
    t.t_on = on;
    t.t_off = off;
    t.occupied_bw = bw;
    t.n_subtones = bw > 0.0 ? 31 : 1;
    return t;
}

CalibrationCache g_cache;
double g_mean_response = 500e-9;

TapCodes settled(const std::vector<SpectralLine>& lines, const ChainConfig& c) {
    return settle_agc(lines, c, ControllerConfig{}.window(c)).codes;
}

Outcome coupling_anchor() {
    Outcome o;
    ResistiveTapParams p;
    p.r_c = 210.0;
    p.z0 = 50.0;
    const double c = tap_coupling(p);
    const auto s = tap_sparams(p);
    check(o, std::abs(c - -15.0) <= 0.15, fmt("C=%.3f", c));
    check(o, std::abs(s.s11_db - -21.0) <= 0.15, fmt("S11=%.3f", s.s11_db));
    check(o, std::abs(s.s21_db - -0.8) <= 0.15, fmt("S21=%.3f", s.s21_db));
    if (o.pass) o.detail = fmt("C=%.2f S11=%.2f S21=%.3f dB", c, s.s11_db, s.s21_db);
    return o;
}

Outcome resolution_anchor() {
    Outcome o;
    const ChainConfig c;
    const double r = resolution(Frequency(8e9), Frequency(16e9), c.detector, c.adc);
    const double pct = 100.0 * r / 8e9;
    check(o, std::abs(pct - 0.25) <= 0.01, fmt("resolution %.4f%%", pct));
    const auto pl = place_nodes(Frequency(16e9), 0.0025, c.detector, c.adc);
    check(o, std::abs(pl.f_max_2.hz() - 8e9) <= 50e6, fmt("f_max_2 %.4g", pl.f_max_2.hz()));
    check(o, pl.f_min.hz() >= 3.6e9 && pl.f_min.hz() <= 4.2e9, fmt("f_min %.4g", pl.f_min.hz()));
    if (o.pass) {
        o.detail = fmt("res=%.3f MHz (%.4f%%)", r * 1e-6, pct) +
                   fmt(" f_max_2=%.3f GHz f_min=%.3f GHz", pl.f_max_2.hz() * 1e-9, pl.f_min.hz() * 1e-9);
    }
    return o;
}

Outcome round_trip() {
    Outcome o;
    const ChainConfig c;
    GridSpec g;
    // Offset from the evaluation grid so no point is a calibration node.
    g.f_start = 1.05e9;
    g.f_stop = 15.95e9;
    g.p_start = -19.5;
    g.p_stop = 19.5;
    const auto cal = build_calibration(c, g, ControllerConfig{}.window(c));
    int total = 0, ok = 0, tap_ok = 0;
    double worst_f = 0.0;
    for (int fi = 0; fi <= 69; ++fi) {
        const double f = 1.2e9 + 0.2e9 * fi;
        for (double p = -18.0; p <= 18.0 + 1e-9; p += 2.0) {
            ++total;
            const auto codes = settled({{f, dbm_to_watts(p)}}, c);
            const double fmax = f < c.switch_frequency ? 5e9 : 16e9;
            const double res = resolution(Frequency(f), Frequency(fmax), c.detector, c.adc);
            try {
                const auto e = estimate(codes, cal);
                const double ferr = std::abs(e.freq.hz() - f);
                worst_f = std::max(worst_f, ferr);
                if (ferr <= res + g.f_step && std::abs(e.power.dbm() - p) <= 1.0) ++ok;
                if ((e.tap_used == TapId::l2) == (f < c.switch_frequency)) ++tap_ok;
            } catch (const Error&) {
            }
        }
    }
    const double frac = static_cast<double>(ok) / total;
    check(o, frac >= 0.99, fmt("accuracy %.4f", frac));
    check(o, tap_ok == total, fmt("tap %g/%g", tap_ok, total));
    o.detail += (o.detail.empty() ? "" : "; ") + fmt("%g points, %.2f%% within bound, worst df %.1f MHz", total,
                                                     100.0 * frac, worst_f * 1e-6);
    return o;
}

Outcome modulation_immunity() {
    Outcome o;
    const ChainConfig c;
    const auto cal = g_cache.get(c, GridSpec{}, ControllerConfig{}.window(c));
    int total = 0, within2 = 0;
    double worst = 0.0;
    for (double f = 1.2e9; f <= 14e9 + 1; f += 25e6) {
        for (double p : {-10.0, 0.0, 10.0}) {
            ++total;
            const auto lines = expand_modulated(tone(f, p, 0.0, 1.0, 12e6));
            double err = 1.0;
            try {
                err = std::abs(estimate(settled(lines, c), *cal).freq.hz() - f) / f;
            } catch (const Error&) {
            }
            worst = std::max(worst, err);
            if (err < 0.02) ++within2;
        }
    }
    const double frac = static_cast<double>(within2) / total;
    check(o, worst < 0.05, fmt("max error %.3f%%", 100 * worst));
    check(o, frac >= 0.8, fmt("within 2%%: %.3f", frac));
    o.detail += (o.detail.empty() ? "" : "; ") +
                fmt("%g cases, max %.3f%%, %.1f%% under 2%%", total, 100 * worst, 100 * frac);
    return o;
}

Scenario pulse(std::uint64_t seed) {
    Scenario sc;
    sc.duration = 4e-6;
    sc.seed = seed;
    sc.sources = {tone(6e9, -5.0, 1e-6, 2.5e-6)};
    StageSpec st;
    st.controller.threshold = PowerLevel(-15.0);
    st.filter.reflective = false;
    sc.stages = {st};
    return sc;
}

Outcome response_time() {
    Outcome o;
    double se = 0, sr = 0, lo = 1, hi = 0, lo_r = 1, hi_r = 0;
    int n = 0, missing = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const auto m = run(pulse(seed), &g_cache).metrics;
        if (!m.response_time_engage || !m.response_time_release) {
            ++missing;
            continue;
        }
        const double e = *m.response_time_engage, r = *m.response_time_release;
        se += e;
        sr += r;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
        lo_r = std::min(lo_r, r);
        hi_r = std::max(hi_r, r);
        ++n;
    }
    check(o, missing == 0, fmt("%g runs without a response", missing));
    if (n == 0) return o;
    const double me = se / n, mr = sr / n;
    g_mean_response = me;
    const double eps = 1e-12;
    check(o, me >= 450e-9 && me <= 550e-9, fmt("engage mean %.1f ns", me * 1e9));
    check(o, lo >= 400e-9 - eps && hi <= 600e-9 + eps, fmt("engage support [%.1f, %.1f] ns", lo * 1e9, hi * 1e9));
    check(o, lo_r >= 400e-9 - eps && hi_r <= 600e-9 + eps,
          fmt("release support [%.1f, %.1f] ns", lo_r * 1e9, hi_r * 1e9));
    check(o, std::abs(mr - me) <= 10e-9, fmt("release mean %.1f vs engage %.1f ns", mr * 1e9, me * 1e9));
    o.detail += (o.detail.empty() ? "" : "; ") +
                fmt("engage mean %.1f ns [%.1f, %.1f]", me * 1e9, lo * 1e9, hi * 1e9) +
                fmt(", release mean %.1f ns", mr * 1e9);
    return o;
}

Outcome limiter() {
    Outcome o;
    int cases = 0;
    for (double th : {-20.0, -10.0, 0.0, 10.0, 20.0}) {
        for (double d : {-3.0, -1.0, -0.5, 0.5, 1.0, 3.0}) {
            for (double f : {3e9, 9e9}) {
                Scenario sc;
                // Steady state: the AGC climbs one step per clock, so the full
                // attenuator range takes ~26 us.
                sc.duration = 40e-6;
                sc.sources = {tone(f, th + d)};
                StageSpec st;
                st.controller.threshold = PowerLevel(th);
                st.filter.reflective = false;
                sc.stages = {st};
                const auto r = run(sc, &g_cache);
                const bool engaged = r.trace.steps.back().stages[0].filter.engaged;
                ++cases;
                check(o, engaged == (d > 0.0), fmt("th %g P %g f %g", th, th + d, f));
            }
        }
    }
    const auto m = NotchModel::defaults(NotchKind::evanescent_pin);
    const FilterState on{true, 8e9, 0.0};
    double prev = 1e9, first = 0.0, last = 0.0;
    for (double p = m.power_knee_dbm; p <= m.power_knee_dbm + 30.0 + 1e-9; p += 0.25) {
        const double sup = -notch_s21_db(m, on, Frequency(8e9), PowerLevel(p), 1.0);
        check(o, sup <= prev, fmt("suppression rises at %g dBm", p));
        if (p == m.power_knee_dbm) first = sup;
        last = sup;
        prev = sup;
    }
    check(o, last < first, "suppression does not degrade above knee");
    if (o.pass) o.detail = fmt("%g limiter cases; suppression %.1f -> %.1f dB above knee", cases, first, last);
    return o;
}

Scenario stability(CouplingKind kind) {
    Scenario sc;
    sc.duration = 20e-6;
    sc.seed = 7;
    StageSpec st;
    st.chain.coupling_kind = kind;
    // Round trip to the notch and back: half a period at 6 GHz.
    st.electrical_delay = 1.0 / (4.0 * 6e9);
    if (kind == CouplingKind::tap) {
        sc.sources = {tone(6e9, -7.0)};
        st.controller.threshold = PowerLevel(-10.0);
    } else {
        sc.sources = {tone(6e9, -5.0)};
        st.controller.threshold = PowerLevel(-15.0);
    }
    sc.stages = {st};
    return sc;
}

Outcome stability_check() {
    Outcome o;
    const double round_trip_phase = 2.0 * std::numbers::pi * 6e9 * 2.0 * stability(CouplingKind::tap).stages[0].electrical_delay;
    check(o, std::abs(round_trip_phase - std::numbers::pi) < 1e-9, "round-trip phase");
    const auto tap = run(stability(CouplingKind::tap), &g_cache).metrics;
    check(o, tap.limit_cycle, "tap: no limit cycle");
    const double want = 2.0 * g_mean_response;
    check(o, std::abs(tap.limit_cycle_period - want) <= 0.2 * want,
          fmt("tap period %.1f ns vs %.1f ns", tap.limit_cycle_period * 1e9, want * 1e9));
    const ChainConfig cc;
    check(o, cc.coupler.directivity_db.at(6e9) <= 6.0 + 1e-9, "coupler directivity above 6 dB");
    const auto cpl = run(stability(CouplingKind::coupler), &g_cache);
    check(o, !cpl.metrics.limit_cycle, "coupler: limit cycle");
    check(o, cpl.trace.steps.back().stages[0].filter_effective, "coupler: filter not held");
    if (o.pass) {
        o.detail = fmt("tap period %.1f ns (2x response %.1f ns); coupler stable", tap.limit_cycle_period * 1e9,
                       want * 1e9);
    }
    return o;
}

Outcome cascade() {
    Outcome o;
    const ChainConfig c;
    for (auto [p6, p12] : std::vector<std::pair<double, double>>{{7, -18}, {-18, 7}, {2, -18}, {-18, 2}}) {
        Scenario sc;
        sc.duration = 150e-6;
        sc.sources = {tone(6e9, p6), tone(12e9, p12)};
        StageSpec s1;
        s1.controller.threshold = PowerLevel(-20.0);
        s1.filter = NotchModel::defaults(NotchKind::yig);
        s1.filter.depth_db = 60.0;
        s1.filter.bw_3db = 400e6;
        s1.filter.reflective = false;
        StageSpec s2;
        s2.controller.threshold = PowerLevel(-20.0);
        s2.filter.bw_3db = 600e6;
        s2.filter.reflective = false;
        sc.stages = {s1, s2};
        const auto r = run(sc, &g_cache);
        const auto& last = r.trace.steps.back();
        const double strong = p6 > p12 ? 6e9 : 12e9;
        const double tol = resolution(Frequency(strong), Frequency(16e9), c.detector, c.adc) + 0.1e9;
        const std::string tag = fmt("(%g,%g) ", p6, p12);
        check(o, last.stages[0].filter.engaged && std::abs(last.stages[0].filter.f_center - strong) <= tol,
              tag + fmt("stage 1 at %.3f GHz", last.stages[0].filter.f_center * 1e-9));
        for (std::size_t i = 0; i < 2; ++i) {
            check(o, last.stages[1].out_dbm[i] < -20.0, tag + fmt("tone %g out %.1f dBm", i, last.stages[1].out_dbm[i]));
        }
    }
    if (o.pass) o.detail = "4 orderings suppressed, stage 1 on the stronger tone";
    return o;
}

Outcome properties() {
    Outcome o;
    const ChainConfig c;
    // Standing-wave ratio strictly decreasing on (0, f_max].
    for (const auto& tap : c.stub.taps) {
        double prev = 2.0;
        for (int i = 1; i <= 2000; ++i) {
            const double f = tap.f_max * i / 2000.0;
            const double r = standing_ratio(Frequency(f), Frequency(tap.f_max));
            if (!(r < prev)) {
                check(o, false, tap.name + fmt(" not monotone at %g", f));
                break;
            }
            const double back = 2.0 * tap.f_max / std::numbers::pi * std::acos(r);
            if (std::abs(back - f) > 1e-3 * tap.f_max) {
                check(o, false, tap.name + fmt(" not invertible at %g", f));
                break;
            }
            prev = r;
        }
    }
    // Power-sum homogeneity.
    const std::vector<SpectralLine> a{{3e9, 1e-3}}, b{{7e9, 2e-3}}, ab{{3e9, 1e-3}, {7e9, 2e-3}},
        a4{{3e9, 4e-3}};
    const auto va = tap_rms_voltages(a, c.stub), vb = tap_rms_voltages(b, c.stub),
               vab = tap_rms_voltages(ab, c.stub), va4 = tap_rms_voltages(a4, c.stub);
    for (std::size_t i = 0; i < va.taps.size(); ++i) {
        const double sum = va.taps[i] * va.taps[i] + vb.taps[i] * vb.taps[i];
        check(o, std::abs(vab.taps[i] * vab.taps[i] - sum) <= 1e-12 * sum, "power sum");
        check(o, std::abs(va4.taps[i] - 2.0 * va.taps[i]) <= 1e-12 * va.taps[i], "homogeneity");
    }
    // AGC settles to a fixed point for every constant input.
    const auto window = ControllerConfig{}.window(c);
    for (double p = -20.0; p <= 20.0 + 1e-9; p += 0.5) {
        for (double f : {2e9, 8e9, 14e9}) {
            const std::vector<SpectralLine> l{{f, dbm_to_watts(p)}};
            const auto s = settle_agc(l, c, window);
            const auto next = agc_policy(s.codes.code_oc, s.att_db, window, c.attenuator);
            check(o, next.att_db == s.att_db && s.steps < 200, fmt("AGC at %g dBm %g Hz", p, f));
        }
    }
    // Determinism.
    auto trace_text = [](const Scenario& sc) {
        std::ostringstream os;
        CalibrationCache local;
        write_trace_csv(os, run(sc, &local).trace);
        return os.str();
    };
    check(o, trace_text(stability(CouplingKind::tap)) == trace_text(stability(CouplingKind::tap)), "determinism");
    // Lossless reflective notches.
    for (auto kind : {NotchKind::evanescent_pin, NotchKind::yig, NotchKind::ideal}) {
        auto m = NotchModel::defaults(kind);
        m.reflective = true;
        const FilterState on{true, 8e9, 0.0};
        for (double f = 7e9; f <= 9e9; f += 10e6) {
            for (double p : {-10.0, 15.0}) {
                const double s21 = std::pow(10.0, notch_s21_db(m, on, Frequency(f), PowerLevel(p), 1.0) / 10.0);
                const double g = stopband_gamma(m, on, Frequency(f), PowerLevel(p), 1.0);
                if (std::abs(s21 + g * g - 1.0) > 1e-12) {
                    check(o, false, std::string(to_string(kind)) + fmt(" energy at %g", f));
                    break;
                }
            }
        }
    }
    if (o.pass) o.detail = "monotonicity, power sum, AGC fixed point, determinism, |s21|^2+|G|^2=1";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        std::function<Outcome()> body;
        /// Wall-clock budget in seconds; 0 means none.
        double budget = 0.0;
    };
    const std::vector<Criterion> criteria{
        {"coupling formula anchor", coupling_anchor, 1.0},
        {"resolution anchor", resolution_anchor, 1.0},
        {"round-trip estimation", round_trip, 30.0},
        {"modulation immunity", modulation_immunity, 30.0},
        {"response time", response_time, 60.0},
        {"programmable limiter", limiter},
        {"stability", stability_check},
        {"cascade", cascade, 10.0},
        {"property suites", properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].body();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (criteria[i].budget > 0.0) check(o, secs <= criteria[i].budget, fmt("over budget %.0f s", criteria[i].budget));
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
