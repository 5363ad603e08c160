#pragma once

// Units, conversions and the multi-tone signal descriptor shared by every
// other module. All quantities are SI (Hz, s, W, V, ohm) except power
// levels, which are carried in dBm.

#include <cstddef>
#include <vector>

namespace swsense {

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Strictly positive, finite frequency in hertz.
class Frequency {
public:
    constexpr Frequency() = default;
    explicit Frequency(double hertz);

    static Frequency ghz(double v) { return Frequency(v * 1e9); }
    static Frequency mhz(double v) { return Frequency(v * 1e6); }

    [[nodiscard]] constexpr double hz() const { return hz_; }
    [[nodiscard]] constexpr double in_ghz() const { return hz_ * 1e-9; }

    friend constexpr auto operator<=>(const Frequency&, const Frequency&) = default;

private:
    double hz_ = 1.0;
};

/// Power level in dBm. Any finite value is allowed.
class PowerLevel {
public:
    constexpr PowerLevel() = default;
    explicit PowerLevel(double dbm);

    [[nodiscard]] constexpr double dbm() const { return dbm_; }
    [[nodiscard]] double watts() const;

    static PowerLevel from_watts(double watts);

    friend constexpr auto operator<=>(const PowerLevel&, const PowerLevel&) = default;

private:
    double dbm_ = 0.0;
};

double dbm_to_watts(PowerLevel p);
double dbm_to_watts(double dbm);
/// Inverse of dbm_to_watts. Zero watts maps to -infinity.
double watts_to_dbm(double watts);

double db_to_power_ratio(double db);
double db_to_voltage_ratio(double db);
double power_ratio_to_db(double ratio);
double voltage_ratio_to_db(double ratio);

/// An interferer or signal of interest. A tone with non-zero occupied
/// bandwidth is treated as a flat comb of `n_subtones` equal-power lines.
struct Tone {
    Frequency freq;
    PowerLevel power;
    double t_on = 0.0;
    double t_off = 1.0;
    double occupied_bw = 0.0;
    int n_subtones = 1;

    void validate() const;
    [[nodiscard]] bool active_at(double t) const { return t >= t_on && t < t_off; }
};

struct SignalDescriptor {
    std::vector<Tone> tones;
};

/// One spectral line after expansion: frequency plus power in watts.
struct SpectralLine {
    double freq_hz = 0.0;
    double watts = 0.0;
};

/// Splits a (possibly modulated) tone into equal-power lines uniformly
/// spanning [freq - bw/2, freq + bw/2]. A zero-bandwidth tone maps to itself.
std::vector<SpectralLine> expand_modulated(const Tone& t);

/// Expands every tone of the descriptor; the result is the concatenation.
std::vector<SpectralLine> expand_signal(const SignalDescriptor& sig);

}  // namespace swsense
