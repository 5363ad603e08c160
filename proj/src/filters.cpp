#include "swsense/filters.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "swsense/error.hpp"

namespace swsense {

std::string_view to_string(NotchKind k) {
    switch (k) {
        case NotchKind::evanescent_pin: return "evanescent_pin";
        case NotchKind::yig: return "yig";
        case NotchKind::ideal: return "ideal";
    }
    return "?";
}

NotchKind notch_kind_from_string(std::string_view s) {
    if (s == "evanescent_pin") return NotchKind::evanescent_pin;
    if (s == "yig") return NotchKind::yig;
    if (s == "ideal") return NotchKind::ideal;
    throw ConfigError("unknown notch kind '" + std::string(s) + "'");
}

NotchModel NotchModel::defaults(NotchKind kind) {
    NotchModel m;
    m.kind = kind;
    switch (kind) {
        case NotchKind::evanescent_pin:
            break;
        case NotchKind::yig:
            m.f_tune_min = 2e9;
            m.f_tune_max = 18e9;
            m.depth_db = 40.0;
            m.tuning_time = 100e-6;
            break;
        case NotchKind::ideal:
            m.depth_db = 60.0;
            m.tuning_time = 0.0;
            break;
    }
    return m;
}

void NotchModel::validate() const {
    if (!(depth_db > 0.0)) throw ConfigError("notch depth_db must be positive");
    if (!(f_tune_min > 0.0 && f_tune_max > f_tune_min)) {
        throw ConfigError("notch tuning range must satisfy 0 < min < max");
    }
    if (!(bw_3db > 0.0)) throw ConfigError("notch bw_3db must be positive");
    if (!(tuning_time >= 0.0)) throw ConfigError("notch tuning_time must be >= 0");
    if (!(depth_slope_db_per_db >= 0.0)) throw ConfigError("notch depth slope must be >= 0");
}

double effective_depth_db(const NotchModel& m, PowerLevel p_in) {
    if (m.kind != NotchKind::evanescent_pin) return m.depth_db;
    const double excess = std::max(0.0, p_in.dbm() - m.power_knee_dbm);
    return std::max(3.0, m.depth_db - m.depth_slope_db_per_db * excess);
}

double notch_s21_db(const NotchModel& m, const FilterState& st, Frequency f, PowerLevel p_in,
                    double now) {
    if (!st.effective_at(now)) return 0.0;
    const double x = (f.hz() - st.f_center) / (m.bw_3db / 2.0);
    return -effective_depth_db(m, p_in) / (1.0 + x * x);
}

double stopband_gamma(const NotchModel& m, const FilterState& st, Frequency f, PowerLevel p_in,
                      double now) {
    if (!m.reflective) return 0.0;
    const double t = db_to_power_ratio(notch_s21_db(m, st, f, p_in, now));
    return std::sqrt(std::max(0.0, 1.0 - t));
}

FilterState tune(const NotchModel& m, const FilterState& /*st*/, Frequency target, double now) {
    if (target.hz() < m.f_tune_min || target.hz() > m.f_tune_max) {
        std::ostringstream msg;
        msg << "tune target " << target.hz() << " Hz outside [" << m.f_tune_min << ", "
            << m.f_tune_max << "] Hz";
        throw TuningRangeError(msg.str());
    }
    return {true, target.hz(), now + m.tuning_time};
}

FilterState release(const FilterState& st) {
    FilterState out = st;
    out.engaged = false;
    return out;
}

}  // namespace swsense
