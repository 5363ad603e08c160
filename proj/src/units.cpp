#include "swsense/units.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace swsense {

Frequency::Frequency(double hertz) : hz_(hertz) {
    if (!std::isfinite(hertz) || hertz <= 0.0) {
        throw std::invalid_argument("frequency must be finite and positive, got " +
                                    std::to_string(hertz));
    }
}

PowerLevel::PowerLevel(double dbm) : dbm_(dbm) {
    if (!std::isfinite(dbm)) {
        throw std::invalid_argument("power level must be finite");
    }
}

double PowerLevel::watts() const { return dbm_to_watts(dbm_); }

PowerLevel PowerLevel::from_watts(double watts) { return PowerLevel(watts_to_dbm(watts)); }

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

double dbm_to_watts(PowerLevel p) { return dbm_to_watts(p.dbm()); }

double watts_to_dbm(double watts) {
    if (watts <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(watts * 1000.0);
}

double db_to_power_ratio(double db) { return std::pow(10.0, db / 10.0); }
double db_to_voltage_ratio(double db) { return std::pow(10.0, db / 20.0); }

double power_ratio_to_db(double ratio) {
    if (ratio <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(ratio);
}

double voltage_ratio_to_db(double ratio) {
    if (ratio <= 0.0) return -std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(ratio);
}

void Tone::validate() const {
    if (!(t_on < t_off)) throw std::invalid_argument("tone requires t_on < t_off");
    if (!(occupied_bw >= 0.0) || !std::isfinite(occupied_bw)) {
        throw std::invalid_argument("tone occupied bandwidth must be finite and >= 0");
    }
    if (n_subtones < 1 || n_subtones % 2 == 0) {
        throw std::invalid_argument("tone n_subtones must be odd and >= 1");
    }
    if (occupied_bw == 0.0 && n_subtones != 1) {
        throw std::invalid_argument("a zero-bandwidth tone must have exactly one subtone");
    }
    if (occupied_bw / 2.0 >= freq.hz()) {
        throw std::invalid_argument("tone bandwidth extends below 0 Hz");
    }
}

std::vector<SpectralLine> expand_modulated(const Tone& t) {
    const double total = dbm_to_watts(t.power);
    if (t.occupied_bw == 0.0 || t.n_subtones == 1) {
        return {{t.freq.hz(), total}};
    }
    const int n = t.n_subtones;
    const double each = total / n;
    const double spacing = t.occupied_bw / (n - 1);
    const double start = t.freq.hz() - t.occupied_bw / 2.0;
    std::vector<SpectralLine> lines;
    lines.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        lines.push_back({start + spacing * i, each});
    }
    return lines;
}

std::vector<SpectralLine> expand_signal(const SignalDescriptor& sig) {
    std::vector<SpectralLine> out;
    for (const auto& t : sig.tones) {
        auto lines = expand_modulated(t);
        out.insert(out.end(), lines.begin(), lines.end());
    }
    return out;
}

}  // namespace swsense
