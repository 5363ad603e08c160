#include "swsense/coupling.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "swsense/csv.hpp"
#include "swsense/error.hpp"

namespace swsense {

void ResistiveTapParams::validate() const {
    if (!(std::isfinite(r_c) && r_c > 0.0)) throw ConfigError("tap r_c must be finite and positive");
    if (!(std::isfinite(z0) && z0 > 0.0)) throw ConfigError("tap z0 must be finite and positive");
}

namespace {

// Node voltage ratio across the tap; equal to |S21|.
double through_ratio(const ResistiveTapParams& p) {
    return (2.0 * p.r_c + 2.0 * p.z0) / (2.0 * p.r_c + 3.0 * p.z0);
}

}  // namespace

double tap_coupling(const ResistiveTapParams& p) {
    p.validate();
    return 20.0 * std::log10(2.0 * p.z0 / (2.0 * p.r_c + 3.0 * p.z0));
}

TapSParams tap_sparams(const ResistiveTapParams& p) {
    p.validate();
    return {20.0 * std::log10(p.z0 / (2.0 * p.r_c + 3.0 * p.z0)),
            20.0 * std::log10(through_ratio(p))};
}

double tap_dissipation_fraction(const ResistiveTapParams& p) {
    p.validate();
    const double k = through_ratio(p);
    const double sum = p.r_c + p.z0;
    return k * k * p.r_c * p.z0 / (sum * sum);
}

double tap_dissipation(const ResistiveTapParams& p, PowerLevel p_in) {
    return tap_dissipation_fraction(p) * dbm_to_watts(p_in);
}

PowerLevel max_input_for_package(const ResistiveTapParams& p, double limit_w) {
    if (!(limit_w > 0.0)) throw ConfigError("package limit must be positive");
    return PowerLevel::from_watts(limit_w / tap_dissipation_fraction(p));
}

void DirectionalCouplerParams::validate() const {
    if (coupling_db.empty() || insertion_db.empty() || directivity_db.empty()) {
        throw ConfigError("coupler tables must not be empty");
    }
    if (!(f_min > 0.0 && f_max > f_min)) throw ConfigError("coupler band must satisfy 0 < f_min < f_max");
    if (coupling_db.max_value() >= 0.0) throw ConfigError("coupler coupling_db must be negative");
    if (directivity_db.min_value() < 0.0) throw ConfigError("coupler directivity_db must be >= 0");
    if (insertion_db.min_value() < 0.0) throw ConfigError("coupler insertion_db is a loss and must be >= 0");
}

CouplerResponse coupler_response(const DirectionalCouplerParams& p, Frequency f) {
    if (f.hz() < p.f_min || f.hz() > p.f_max) {
        std::ostringstream msg;
        msg << "frequency " << f.hz() << " Hz outside coupler band [" << p.f_min << ", " << p.f_max
            << "] Hz";
        throw OutOfBandError(msg.str());
    }
    return {p.coupling_db.at(f.hz()), p.insertion_db.at(f.hz()), p.directivity_db.at(f.hz())};
}

DirectionalCouplerParams parse_coupler_csv(std::string_view text) {
    const auto table = parse_csv(text);
    const auto col_f = table.column_index("freq_hz");
    const auto col_c = table.column_index("coupling_db");
    const auto col_i = table.column_index("insertion_db");
    const auto col_d = table.column_index("directivity_db");
    std::vector<std::pair<double, double>> c, il, d;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const double f = table.number(r, col_f);
        c.emplace_back(f, table.number(r, col_c));
        il.emplace_back(f, table.number(r, col_i));
        d.emplace_back(f, table.number(r, col_d));
    }
    if (c.empty()) throw ConfigError("coupler CSV has no data rows");
    DirectionalCouplerParams p;
    try {
        p.coupling_db = FrequencyTable(std::move(c));
        p.insertion_db = FrequencyTable(std::move(il));
        p.directivity_db = FrequencyTable(std::move(d));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("coupler CSV: ") + e.what());
    }
    p.f_min = p.coupling_db.points().front().first;
    p.f_max = p.coupling_db.points().back().first;
    if (p.f_min == p.f_max) {
        throw ConfigError("coupler CSV needs at least two frequencies to define a band");
    }
    p.validate();
    return p;
}

DirectionalCouplerParams load_coupler_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open coupler CSV '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_coupler_csv(ss.str());
}

std::string_view to_string(CouplingKind k) {
    return k == CouplingKind::tap ? "tap" : "coupler";
}

CouplingKind coupling_kind_from_string(std::string_view s) {
    if (s == "tap") return CouplingKind::tap;
    if (s == "coupler") return CouplingKind::coupler;
    throw ConfigError("unknown coupling kind '" + std::string(s) + "' (expected tap|coupler)");
}

double sampled_forward_amplitude(CouplingKind kind, std::complex<double> gamma,
                                 double electrical_delay, Frequency f,
                                 const DirectionalCouplerParams& coupler) {
    if (std::abs(gamma) > 1.0 + 1e-12) throw ConfigError("|gamma| must not exceed 1");
    double leak = 1.0;
    if (kind == CouplingKind::coupler) {
        leak = db_to_voltage_ratio(-coupler_response(coupler, f).directivity_db);
    }
    const double phase = -2.0 * 2.0 * std::numbers::pi * f.hz() * electrical_delay;
    return std::abs(1.0 + gamma * leak * std::polar(1.0, phase));
}

double sampled_forward_amplitude(CouplingKind kind, const ReflectionEnvironment& env, Frequency f,
                                 const DirectionalCouplerParams& coupler) {
    const std::complex<double> gamma = env.gamma ? env.gamma(f.hz()) : std::complex<double>{};
    return sampled_forward_amplitude(kind, gamma, env.electrical_delay, f, coupler);
}

}  // namespace swsense
