#include "swsense/stub.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "swsense/error.hpp"

namespace swsense {

void StubParams::validate() const {
    if (!(z0s > 0.0)) throw ConfigError("stub z0s must be positive");
    if (!(eps_eff >= 1.0)) throw ConfigError("stub eps_eff must be >= 1");
    if (taps.empty()) throw ConfigError("stub needs at least one tap");
    for (std::size_t i = 0; i < taps.size(); ++i) {
        if (!(taps[i].f_max > 0.0)) throw ConfigError("tap f_max must be positive");
        if (i > 0 && !(taps[i].f_max < taps[i - 1].f_max)) {
            throw ConfigError("stub taps must be sorted by strictly descending f_max");
        }
    }
}

double v_oc_magnitude(double p_stub_watts, double z0s) {
    if (p_stub_watts < 0.0) throw std::invalid_argument("stub power must be >= 0");
    return std::sqrt(8.0 * p_stub_watts * z0s);
}

double standing_ratio_folded(double f_hz, double f_max_hz) {
    return std::abs(std::cos(std::numbers::pi / 2.0 * f_hz / f_max_hz));
}

double standing_ratio(Frequency f, Frequency f_max) {
    if (f > f_max) {
        std::ostringstream msg;
        msg << "frequency " << f.hz() << " Hz beyond bijective limit " << f_max.hz() << " Hz";
        throw BijectivityError(msg.str());
    }
    return standing_ratio_folded(f.hz(), f_max.hz());
}

double tap_length(Frequency f_max, double eps_eff) {
    if (!(eps_eff >= 1.0)) throw std::invalid_argument("eps_eff must be >= 1");
    return kSpeedOfLight / (4.0 * f_max.hz() * std::sqrt(eps_eff));
}

TapVoltages tap_rms_voltages(std::span<const SpectralLine> stub_lines, const StubParams& stub) {
    TapVoltages out;
    out.taps.assign(stub.taps.size(), 0.0);
    double oc_sq = 0.0;
    for (const auto& line : stub_lines) {
        const double v = v_oc_magnitude(line.watts, stub.z0s);
        const double v_sq = v * v;
        oc_sq += v_sq;
        for (std::size_t k = 0; k < stub.taps.size(); ++k) {
            const double r = standing_ratio_folded(line.freq_hz, stub.taps[k].f_max);
            out.taps[k] += v_sq * r * r;
        }
    }
    out.v_oc = std::sqrt(oc_sq);
    for (auto& t : out.taps) t = std::sqrt(t);
    return out;
}

TapVoltages tap_rms_voltages(const SignalDescriptor& sig, const StubParams& stub,
                             std::span<const double> p_stub_per_tone) {
    auto lines = expand_signal(sig);
    if (lines.size() != p_stub_per_tone.size()) {
        throw std::invalid_argument("need exactly one stub power per expanded tone");
    }
    for (std::size_t i = 0; i < lines.size(); ++i) lines[i].watts = p_stub_per_tone[i];
    return tap_rms_voltages(lines, stub);
}

}  // namespace swsense
