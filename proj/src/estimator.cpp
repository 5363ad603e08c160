#include "swsense/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "swsense/config_io.hpp"
#include "swsense/error.hpp"

namespace swsense {

namespace {

std::vector<double> linear_grid(double start, double stop, double step, const char* what) {
    if (!(step > 0.0) || !(stop >= start) || !std::isfinite(start) || !std::isfinite(stop)) {
        throw ConfigError(std::string("invalid ") + what + " grid");
    }
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = start + step * static_cast<double>(i);
    return out;
}

double codes_per_db(const ChainConfig& cfg) { return cfg.detector.slope_a / 20.0 / cfg.adc.lsb(); }

std::size_t tap_index(TapId t) { return t == TapId::l1 ? 0 : 1; }

int tap_code(const TapCodes& c, TapId t) { return t == TapId::l1 ? c.code_l1 : c.code_l2; }

int tap_code(const CalibrationCell& c, TapId t) { return t == TapId::l1 ? c.code_l1 : c.code_l2; }

}  // namespace

std::vector<double> GridSpec::freqs() const {
    if (!(f_start > 0.0)) throw ConfigError("frequency grid must start above 0 Hz");
    return linear_grid(f_start, f_stop, f_step, "frequency");
}

std::vector<double> GridSpec::powers() const { return linear_grid(p_start, p_stop, p_step, "power"); }

std::string_view to_string(TapId t) { return t == TapId::l1 ? "l1" : "l2"; }

std::string_view to_string(Confidence c) {
    switch (c) {
        case Confidence::in_range: return "in-range";
        case Confidence::clamped: return "clamped";
        case Confidence::saturated: return "saturated";
    }
    return "?";
}

CalibrationTable::CalibrationTable(std::vector<double> freq_grid, std::vector<double> power_grid,
                                   std::vector<CalibrationCell> cells,
                                   std::array<double, 3> d_const, std::string config_hash,
                                   ChainConfig chain, AgcWindow agc)
    : freq_grid_(std::move(freq_grid)),
      power_grid_(std::move(power_grid)),
      cells_(std::move(cells)),
      d_const_(d_const),
      config_hash_(std::move(config_hash)),
      chain_(std::move(chain)),
      agc_(agc) {
    if (freq_grid_.empty() || power_grid_.empty()) throw ConfigError("calibration grids must not be empty");
    for (std::size_t i = 1; i < freq_grid_.size(); ++i) {
        if (!(freq_grid_[i] > freq_grid_[i - 1])) throw ConfigError("calibration frequency grid must be strictly increasing");
    }
    for (std::size_t i = 1; i < power_grid_.size(); ++i) {
        if (!(power_grid_[i] > power_grid_[i - 1])) throw ConfigError("calibration power grid must be strictly increasing");
    }
    if (cells_.size() != freq_grid_.size() * power_grid_.size()) {
        throw ConfigError("calibration table is incomplete: expected " +
                          std::to_string(freq_grid_.size() * power_grid_.size()) + " cells, got " +
                          std::to_string(cells_.size()));
    }
    build_index();
}

const CalibrationCell& CalibrationTable::cell(std::size_t i_f, std::size_t i_p) const {
    return cells_.at(i_f * power_grid_.size() + i_p);
}

void CalibrationTable::build_index() {
    columns_.assign(freq_grid_.size(), {});
    for (std::size_t i_f = 0; i_f < freq_grid_.size(); ++i_f) {
        auto& col = columns_[i_f];
        for (std::size_t i_p = 0; i_p < power_grid_.size(); ++i_p) {
            const auto& c = cell(i_f, i_p);
            col.push_back({power_grid_[i_p] - c.att_db, c.code_oc, i_p});
        }
        std::stable_sort(col.begin(), col.end(),
                         [](const LevelPoint& a, const LevelPoint& b) { return a.level < b.level; });
        col.erase(std::unique(col.begin(), col.end(),
                              [](const LevelPoint& a, const LevelPoint& b) {
                                  return std::abs(a.level - b.level) < 1e-9;
                              }),
                  col.end());
    }
}

double CalibrationTable::column_level(std::size_t i_f, int code_oc) const {
    const auto& col = columns_.at(i_f);
    const double cpd = codes_per_db(chain_);
    if (code_oc <= col.front().code_oc) {
        return col.front().level + (code_oc - col.front().code_oc) / cpd;
    }
    if (code_oc >= col.back().code_oc) {
        // Exact hit on a saturated plateau resolves to its lowest level.
        for (const auto& p : col) {
            if (p.code_oc == code_oc) return p.level;
        }
        return col.back().level + (code_oc - col.back().code_oc) / cpd;
    }
    for (std::size_t k = 0; k + 1 < col.size(); ++k) {
        const auto& a = col[k];
        const auto& b = col[k + 1];
        if (a.code_oc == code_oc) return a.level;
        if (a.code_oc < code_oc && code_oc < b.code_oc) {
            const double w = static_cast<double>(code_oc - a.code_oc) / (b.code_oc - a.code_oc);
            return a.level + w * (b.level - a.level);
        }
    }
    return col.back().level;
}

double CalibrationTable::stub_referred_level(int code_oc, double freq_hz) const {
    if (freq_hz <= freq_grid_.front()) return column_level(0, code_oc);
    if (freq_hz >= freq_grid_.back()) return column_level(freq_grid_.size() - 1, code_oc);
    const auto hi = static_cast<std::size_t>(
        std::upper_bound(freq_grid_.begin(), freq_grid_.end(), freq_hz) - freq_grid_.begin());
    const auto lo = hi - 1;
    const double w = (freq_hz - freq_grid_[lo]) / (freq_grid_[hi] - freq_grid_[lo]);
    if (w == 0.0) return column_level(lo, code_oc);
    return (1.0 - w) * column_level(lo, code_oc) + w * column_level(hi, code_oc);
}

int CalibrationTable::tap_delta(std::size_t i_f, TapId tap, double level) const {
    const auto& col = columns_.at(i_f);
    const LevelPoint* best = &col.front();
    for (const auto& p : col) {
        if (std::abs(p.level - level) < std::abs(best->level - level)) best = &p;
    }
    const auto& c = cell(i_f, best->i_p);
    return tap_code(c, tap) - c.code_oc;
}

CalibrationTable build_calibration(const ChainConfig& cfg, const GridSpec& grid,
                                   const AgcWindow& window) {
    cfg.validate();
    auto freqs = grid.freqs();
    auto powers = grid.powers();
    const double f_limit = cfg.stub.taps.front().f_max;
    const int floor_code = detector_floor_code(cfg);
    const int ceil_code = detector_ceiling_code(cfg);

    std::vector<CalibrationCell> cells;
    cells.reserve(freqs.size() * powers.size());
    for (double f : freqs) {
        if (f > f_limit * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "calibration frequency " << f << " Hz exceeds the bijective limit " << f_limit
                << " Hz of l1";
            throw CalibrationRangeError(msg.str());
        }
        for (double p : powers) {
            const std::vector<SpectralLine> lines{{f, dbm_to_watts(p)}};
            AgcSettled s;
            try {
                s = settle_agc(lines, cfg, window);
            } catch (const OutOfBandError& e) {
                throw CalibrationRangeError(std::string("calibration grid: ") + e.what());
            }
            if (s.codes.code_oc <= floor_code || s.codes.code_oc >= ceil_code) {
                std::ostringstream msg;
                msg << "calibration point (" << f << " Hz, " << p
                    << " dBm) is outside the detector's representable range";
                throw CalibrationRangeError(msg.str());
            }
            cells.push_back({s.att_db, s.codes.code_oc, s.codes.code_l1, s.codes.code_l2});
        }
    }
    // Reference drive is the AGC-held top of the window; the detectors are
    // identical so every tap shares the same constant.
    const double d = window.high_code * cfg.adc.lsb();
    return CalibrationTable(std::move(freqs), std::move(powers), std::move(cells), {d, d, d},
                            config_hash(cfg), cfg, window);
}

CalibrationTable build_calibration(const ChainConfig& cfg, const GridSpec& grid) {
    return build_calibration(cfg, grid, default_agc_window(cfg));
}

double closed_form_frequency(int code_tap, int code_oc, TapId tap, const CalibrationTable& cal,
                             const ChainConfig& cfg, bool* clamped) {
    const double lsb = cfg.adc.lsb();
    const auto& d = cal.d_const();
    const std::size_t k = tap_index(tap);
    // D of the closed form tracks the measured open end, so residual AGC
    // error cancels.
    const double d_eff = d[k + 1] - d[0] + code_oc * lsb;
    const double v_tap = code_tap * lsb;
    double ratio = std::pow(10.0, (v_tap - d_eff) / cfg.detector.slope_a);
    bool c = false;
    if (ratio >= 1.0) {
        ratio = 1.0;
        c = true;
    }
    if (clamped) *clamped = c;
    const double f_max = cfg.stub.taps[k].f_max;
    return 2.0 * f_max / std::numbers::pi * std::acos(std::clamp(ratio, 0.0, 1.0));
}

namespace {

// Inverse interpolation of the tap-minus-open-end code difference along the
// calibration grid, restricted to segments near the closed-form value.
bool refine_with_table(double f0, TapId tap, int delta_meas, double level,
                       const CalibrationTable& cal, double f_limit, double& out) {
    const auto& fg = cal.freq_grid();
    if (fg.size() < 2) return false;
    auto j0 = static_cast<long>(std::upper_bound(fg.begin(), fg.end(), f0) - fg.begin()) - 1;
    j0 = std::clamp(j0, 0L, static_cast<long>(fg.size()) - 2);
    bool found = false;
    double best = 0.0;
    for (long j = j0 - 3; j <= j0 + 3; ++j) {
        if (j < 0 || j + 1 >= static_cast<long>(fg.size())) continue;
        const auto a = static_cast<std::size_t>(j);
        if (fg[a + 1] > f_limit * (1.0 + 1e-12)) continue;
        const int da = cal.tap_delta(a, tap, level);
        const int db = cal.tap_delta(a + 1, tap, level);
        if (da == db) continue;
        const int lo = std::min(da, db);
        const int hi = std::max(da, db);
        if (delta_meas < lo || delta_meas > hi) continue;
        const double w = static_cast<double>(delta_meas - da) / (db - da);
        const double f = fg[a] + w * (fg[a + 1] - fg[a]);
        if (!found || std::abs(f - f0) < std::abs(best - f0)) {
            best = f;
            found = true;
        }
    }
    if (found) out = best;
    return found;
}

}  // namespace

FrequencyEstimate estimate_frequency(const TapCodes& codes, const CalibrationTable& cal,
                                     const ChainConfig& cfg) {
    const int floor_code = detector_floor_code(cfg);
    const int ceil_code = detector_ceiling_code(cfg);
    if (codes.code_oc <= floor_code) throw NoSignalError("open-end reading at detector floor");
    const auto railed = [&](int c) { return c <= floor_code || c >= ceil_code; };
    if (railed(codes.code_l1) && railed(codes.code_l2)) {
        throw IndeterminateFrequencyError("both standing-wave taps are saturated");
    }

    bool clamped = false;
    const double f1 = closed_form_frequency(codes.code_l1, codes.code_oc, TapId::l1, cal, cfg, &clamped);
    TapId tap = TapId::l1;
    double f0 = f1;
    if (f1 < cfg.switch_frequency) {
        tap = TapId::l2;
        f0 = closed_form_frequency(codes.code_l2, codes.code_oc, TapId::l2, cal, cfg, &clamped);
    }

    const double f_limit = cfg.stub.taps[tap_index(tap)].f_max;
    const double level = cal.stub_referred_level(codes.code_oc, std::max(f0, cal.freq_grid().front()));
    const int delta = tap_code(codes, tap) - codes.code_oc;
    double f = f0;
    refine_with_table(f0, tap, delta, level, cal, f_limit, f);

    const double f_lo = cal.freq_grid().front();
    if (f < f_lo) {
        f = f_lo;
        clamped = true;
    }
    if (f > f_limit) f = f_limit;
    // Keep the reported tap consistent with the reported frequency.
    if (tap == TapId::l2 && f >= cfg.switch_frequency) f = std::nextafter(cfg.switch_frequency, 0.0);
    if (tap == TapId::l1 && f < cfg.switch_frequency) f = cfg.switch_frequency;

    Confidence conf = Confidence::in_range;
    if (codes.code_oc >= ceil_code || railed(tap_code(codes, tap))) {
        conf = Confidence::saturated;
    } else if (clamped) {
        conf = Confidence::clamped;
    }
    return {Frequency(f), tap, conf};
}

PowerLevel estimate_power(const TapCodes& codes, Frequency freq, const CalibrationTable& cal) {
    const auto& cfg = cal.chain();
    if (codes.code_oc <= detector_floor_code(cfg)) {
        throw NoSignalError("open-end reading at detector floor");
    }
    if (codes.code_oc >= detector_ceiling_code(cfg) &&
        codes.att_db >= cfg.attenuator.max_db - 1e-9) {
        throw PowerOverrangeError("open-end detector saturated with the attenuator at maximum");
    }
    return PowerLevel(cal.stub_referred_level(codes.code_oc, freq.hz()) + codes.att_db);
}

Estimate estimate(const TapCodes& codes, const CalibrationTable& cal) {
    const auto fe = estimate_frequency(codes, cal, cal.chain());
    const auto p = estimate_power(codes, fe.freq, cal);
    return {fe.freq, p, fe.tap_used, fe.confidence};
}

double resolution(Frequency f, Frequency f_max, const DetectorParams& det, const AdcParams& adc) {
    if (!(f < f_max)) throw std::invalid_argument("resolution requires 0 < f < f_max");
    const double dv_min = adc.v_fs / static_cast<double>(1 << adc.bits);
    const double slope = det.slope_a * std::numbers::pi / (2.0 * std::numbers::ln10 * f_max.hz()) *
                         std::tan(std::numbers::pi / 2.0 * f.hz() / f_max.hz());
    return dv_min / slope;
}

namespace {

// Smallest f in (0, f_max) where resolution(f)/f <= pct, bisected to 1 MHz.
double relative_resolution_crossing(double f_max, double pct, const DetectorParams& det,
                                    const AdcParams& adc) {
    const auto g = [&](double f) {
        return resolution(Frequency(f), Frequency(f_max), det, adc) / f - pct;
    };
    double lo = f_max * 1e-6;
    double hi = f_max * (1.0 - 1e-9);
    if (!(pct > 0.0) || !(g(lo) > 0.0) || !(g(hi) <= 0.0)) {
        std::ostringstream msg;
        msg << "no frequency in (0, " << f_max << ") Hz meets a relative resolution of " << pct;
        throw PlacementInfeasibleError(msg.str());
    }
    while (hi - lo > 1e6) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

NodePlacement place_nodes(Frequency f_max_1, double max_pct, const DetectorParams& det,
                          const AdcParams& adc) {
    if (!(max_pct > 0.0 && max_pct < 1.0)) {
        throw PlacementInfeasibleError("max_pct must lie in (0, 1)");
    }
    const double f2 = relative_resolution_crossing(f_max_1.hz(), max_pct, det, adc);
    const double fmin = relative_resolution_crossing(f2, max_pct, det, adc);
    return {Frequency(f2), Frequency(fmin)};
}

}  // namespace swsense
