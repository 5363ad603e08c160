#pragma once

// Parametric tunable bandstop filters: evanescent-mode PIN-tuned, YIG and
// an ideal reference notch.

#include <string_view>

#include "swsense/units.hpp"

namespace swsense {

enum class NotchKind { evanescent_pin, yig, ideal };

std::string_view to_string(NotchKind k);
NotchKind notch_kind_from_string(std::string_view s);

struct NotchModel {
    NotchKind kind = NotchKind::evanescent_pin;
    double f_tune_min = 1e9;
    double f_tune_max = 16e9;
    double depth_db = 30.0;
    /// Full width at which the dB attenuation falls to half of depth.
    double bw_3db = 100e6;
    double tuning_time = 50e-9;
    bool reflective = true;
    /// Depth degradation above this input power (evanescent_pin only).
    double power_knee_dbm = 10.0;
    double depth_slope_db_per_db = 1.5;

    /// Defaults appropriate for `kind`.
    static NotchModel defaults(NotchKind kind);
    void validate() const;
    friend bool operator==(const NotchModel&, const NotchModel&) = default;
};

struct FilterState {
    bool engaged = false;
    double f_center = 0.0;
    /// Until this instant the notch is parked off-channel.
    double transition_until = 0.0;

    [[nodiscard]] bool effective_at(double now) const { return engaged && now >= transition_until; }
    friend bool operator==(const FilterState&, const FilterState&) = default;
};

/// Centre depth after power-dependent degradation, floored at 3 dB.
double effective_depth_db(const NotchModel& m, PowerLevel p_in);

/// Transmission in dB (<= 0) at `now`. A disengaged or transitioning filter
/// passes everything.
double notch_s21_db(const NotchModel& m, const FilterState& st, Frequency f, PowerLevel p_in,
                    double now);

/// Reflection magnitude; lossless-notch energy balance for reflective
/// models, zero otherwise.
double stopband_gamma(const NotchModel& m, const FilterState& st, Frequency f, PowerLevel p_in,
                      double now);

/// Engages at `target` with the transition clock (re)started at `now`.
/// Throws TuningRangeError outside the tuning range.
FilterState tune(const NotchModel& m, const FilterState& st, Frequency target, double now);

FilterState release(const FilterState& st);

}  // namespace swsense
