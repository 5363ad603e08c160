#include "swsense/config_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "swsense/csv.hpp"
#include "swsense/error.hpp"

namespace swsense {

namespace {

// Reads fields out of a JSON object and rejects keys nobody asked for.
class Fields {
public:
    Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
    }
    Fields(const Fields&) = delete;
    Fields& operator=(const Fields&) = delete;
    ~Fields() = default;

    const Json* get(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    template <class T>
    void read(const std::string& key, T& out) {
        if (const Json* v = get(key)) {
            try {
                out = v->get<T>();
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(where_ + "." + key + ": " + e.what());
            }
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown field '" + it.key() + "'");
        }
    }

    [[nodiscard]] const std::string& where() const { return where_; }

private:
    const Json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

Json table_to_json(const FrequencyTable& t) {
    if (t.empty()) return Json::array();
    if (t.points().size() == 1) return t.points().front().second;
    Json arr = Json::array();
    for (const auto& [f, v] : t.points()) arr.push_back({f, v});
    return arr;
}

FrequencyTable table_from_json(const Json& j, const std::string& where) {
    if (j.is_number()) return FrequencyTable(j.get<double>());
    if (!j.is_array()) throw ConfigError(where + ": expected a number or [[freq_hz, value], ...]");
    if (j.empty()) return {};
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2) throw ConfigError(where + ": table points are [freq_hz, value]");
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    try {
        return FrequencyTable(std::move(pts));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

void read_table(Fields& f, const std::string& key, FrequencyTable& out) {
    if (const Json* v = f.get(key)) out = table_from_json(*v, f.where() + "." + key);
}

}  // namespace

Json to_json(const ChainConfig& c) {
    Json taps = Json::array();
    for (const auto& t : c.stub.taps) taps.push_back({{"name", t.name}, {"f_max", t.f_max}});
    return {
        {"coupling_kind", std::string(to_string(c.coupling_kind))},
        {"tap", {{"r_c", c.tap.r_c}, {"z0", c.tap.z0}}},
        {"coupler",
         {{"coupling_db", table_to_json(c.coupler.coupling_db)},
          {"insertion_db", table_to_json(c.coupler.insertion_db)},
          {"directivity_db", table_to_json(c.coupler.directivity_db)},
          {"f_min", c.coupler.f_min},
          {"f_max", c.coupler.f_max}}},
        {"attenuator",
         {{"step_db", c.attenuator.step_db},
          {"max_db", c.attenuator.max_db},
          {"settle_time", c.attenuator.settle_time}}},
        {"amplifier", {{"gain_db", c.amplifier.gain_db}, {"p_out_sat_dbm", c.amplifier.p_out_sat_dbm}}},
        {"gain_ripple_db", table_to_json(c.gain_ripple_db)},
        {"stub",
         {{"z0s", c.stub.z0s}, {"taps", taps}, {"eps_eff", c.stub.eps_eff}, {"r_d", c.stub.r_d}}},
        {"detector",
         {{"slope_a", c.detector.slope_a},
          {"intercept_b", c.detector.intercept_b},
          {"v_in_min", c.detector.v_in_min},
          {"v_in_max", c.detector.v_in_max}}},
        {"adc", {{"bits", c.adc.bits}, {"sample_rate", c.adc.sample_rate}, {"v_fs", c.adc.v_fs}}},
        {"switch_frequency", c.switch_frequency},
    };
}

ChainConfig chain_from_json(const Json& j) {
    ChainConfig c;
    Fields f(j, "chain");
    if (const Json* v = f.get("coupling_kind")) c.coupling_kind = coupling_kind_from_string(v->get<std::string>());
    if (const Json* v = f.get("tap")) {
        Fields t(*v, "chain.tap");
        t.read("r_c", c.tap.r_c);
        t.read("z0", c.tap.z0);
        t.finish();
    }
    if (const Json* v = f.get("coupler")) {
        Fields t(*v, "chain.coupler");
        read_table(t, "coupling_db", c.coupler.coupling_db);
        read_table(t, "insertion_db", c.coupler.insertion_db);
        read_table(t, "directivity_db", c.coupler.directivity_db);
        t.read("f_min", c.coupler.f_min);
        t.read("f_max", c.coupler.f_max);
        t.finish();
    }
    if (const Json* v = f.get("attenuator")) {
        Fields t(*v, "chain.attenuator");
        t.read("step_db", c.attenuator.step_db);
        t.read("max_db", c.attenuator.max_db);
        t.read("settle_time", c.attenuator.settle_time);
        t.finish();
    }
    if (const Json* v = f.get("amplifier")) {
        Fields t(*v, "chain.amplifier");
        t.read("gain_db", c.amplifier.gain_db);
        t.read("p_out_sat_dbm", c.amplifier.p_out_sat_dbm);
        t.finish();
    }
    read_table(f, "gain_ripple_db", c.gain_ripple_db);
    if (const Json* v = f.get("stub")) {
        Fields t(*v, "chain.stub");
        t.read("z0s", c.stub.z0s);
        t.read("eps_eff", c.stub.eps_eff);
        t.read("r_d", c.stub.r_d);
        if (const Json* taps = t.get("taps")) {
            if (!taps->is_array()) throw ConfigError("chain.stub.taps: expected an array");
            c.stub.taps.clear();
            for (const auto& e : *taps) {
                Fields tf(e, "chain.stub.taps[]");
                TapSpec spec;
                tf.read("name", spec.name);
                tf.read("f_max", spec.f_max);
                tf.finish();
                c.stub.taps.push_back(spec);
            }
        }
        t.finish();
    }
    if (const Json* v = f.get("detector")) {
        Fields t(*v, "chain.detector");
        t.read("slope_a", c.detector.slope_a);
        t.read("intercept_b", c.detector.intercept_b);
        t.read("v_in_min", c.detector.v_in_min);
        t.read("v_in_max", c.detector.v_in_max);
        t.finish();
    }
    if (const Json* v = f.get("adc")) {
        Fields t(*v, "chain.adc");
        t.read("bits", c.adc.bits);
        t.read("sample_rate", c.adc.sample_rate);
        t.read("v_fs", c.adc.v_fs);
        t.finish();
    }
    f.read("switch_frequency", c.switch_frequency);
    f.finish();
    c.validate();
    return c;
}

Json to_json(const ControllerConfig& c) {
    Json j{{"threshold", c.threshold.dbm()},
           {"clock_period", c.clock_period},
           {"agc_engage_power", c.agc_engage_power.dbm()},
           {"retune_fraction", c.retune_fraction}};
    if (c.agc_high_code) j["agc_high_code"] = *c.agc_high_code;
    if (c.agc_low_code) j["agc_low_code"] = *c.agc_low_code;
    return j;
}

ControllerConfig controller_from_json(const Json& j) {
    ControllerConfig c;
    Fields f(j, "controller");
    if (const Json* v = f.get("threshold")) c.threshold = PowerLevel(v->get<double>());
    f.read("clock_period", c.clock_period);
    if (const Json* v = f.get("agc_high_code")) c.agc_high_code = v->get<int>();
    if (const Json* v = f.get("agc_low_code")) c.agc_low_code = v->get<int>();
    if (const Json* v = f.get("agc_engage_power")) c.agc_engage_power = PowerLevel(v->get<double>());
    f.read("retune_fraction", c.retune_fraction);
    f.finish();
    c.validate();
    return c;
}

Json to_json(const NotchModel& m) {
    return {{"kind", std::string(to_string(m.kind))},
            {"f_tune_range", {m.f_tune_min, m.f_tune_max}},
            {"depth_db", m.depth_db},
            {"bw_3db", m.bw_3db},
            {"tuning_time", m.tuning_time},
            {"reflective", m.reflective},
            {"power_knee_dbm", m.power_knee_dbm},
            {"depth_slope_db_per_db", m.depth_slope_db_per_db}};
}

NotchModel notch_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("filter: expected a JSON object");
    NotchKind kind = NotchKind::evanescent_pin;
    if (auto it = j.find("kind"); it != j.end()) kind = notch_kind_from_string(it->get<std::string>());
    NotchModel m = NotchModel::defaults(kind);
    Fields f(j, "filter");
    f.get("kind");
    if (const Json* v = f.get("f_tune_range")) {
        if (!v->is_array() || v->size() != 2) throw ConfigError("filter.f_tune_range: expected [min_hz, max_hz]");
        m.f_tune_min = (*v)[0].get<double>();
        m.f_tune_max = (*v)[1].get<double>();
    }
    f.read("depth_db", m.depth_db);
    f.read("bw_3db", m.bw_3db);
    f.read("tuning_time", m.tuning_time);
    f.read("reflective", m.reflective);
    f.read("power_knee_dbm", m.power_knee_dbm);
    f.read("depth_slope_db_per_db", m.depth_slope_db_per_db);
    f.finish();
    m.validate();
    return m;
}

Json to_json(const GridSpec& g) {
    return {{"f_start", g.f_start}, {"f_stop", g.f_stop}, {"f_step", g.f_step},
            {"p_start", g.p_start}, {"p_stop", g.p_stop}, {"p_step", g.p_step}};
}

GridSpec grid_from_json(const Json& j) {
    GridSpec g;
    Fields f(j, "calibration_grid");
    f.read("f_start", g.f_start);
    f.read("f_stop", g.f_stop);
    f.read("f_step", g.f_step);
    f.read("p_start", g.p_start);
    f.read("p_stop", g.p_stop);
    f.read("p_step", g.p_step);
    f.finish();
    (void)g.freqs();
    (void)g.powers();
    return g;
}

Json to_json(const Tone& t) {
    return {{"freq", t.freq.hz()},         {"power", t.power.dbm()},
            {"t_on", t.t_on},              {"t_off", t.t_off},
            {"occupied_bw", t.occupied_bw}, {"n_subtones", t.n_subtones}};
}

Tone tone_from_json(const Json& j) {
    Tone t;
    Fields f(j, "tone");
    const Json* freq = f.get("freq");
    const Json* power = f.get("power");
    if (!freq || !power) throw ConfigError("tone: 'freq' and 'power' are required");
    try {
        t.freq = Frequency(freq->get<double>());
        t.power = PowerLevel(power->get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("tone: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("tone: ") + e.what());
    }
    f.read("t_on", t.t_on);
    f.read("t_off", t.t_off);
    f.read("occupied_bw", t.occupied_bw);
    if (const Json* v = f.get("n_subtones")) {
        t.n_subtones = v->get<int>();
    } else if (t.occupied_bw > 0.0) {
        t.n_subtones = 31;
    }
    f.finish();
    try {
        t.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("tone: ") + e.what());
    }
    return t;
}

Json to_json(const AppConfig& c) {
    return {{"chain", to_json(c.chain)},
            {"controller", to_json(c.controller)},
            {"calibration_grid", to_json(c.calibration_grid)},
            {"package_limits_w", c.package_limits_w}};
}

AppConfig app_config_from_json(const Json& j) {
    AppConfig c;
    Fields f(j, "config");
    if (const Json* v = f.get("chain")) c.chain = chain_from_json(*v);
    if (const Json* v = f.get("controller")) c.controller = controller_from_json(*v);
    if (const Json* v = f.get("calibration_grid")) c.calibration_grid = grid_from_json(*v);
    f.read("package_limits_w", c.package_limits_w);
    f.finish();
    for (double w : c.package_limits_w) {
        if (!(w > 0.0)) throw ConfigError("package_limits_w entries must be positive");
    }
    return c;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

AppConfig load_app_config(const std::string& path) { return app_config_from_json(read_json_file(path)); }

std::string config_hash(const ChainConfig& c) {
    const std::string canon = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_calibration(const CalibrationTable& cal, const std::string& csv_path,
                      const std::string& header_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw ConfigError("cannot write '" + csv_path + "'");
    csv << kCalibrationCsvHeader << '\n';
    const auto& fg = cal.freq_grid();
    const auto& pg = cal.power_grid();
    for (std::size_t i = 0; i < fg.size(); ++i) {
        for (std::size_t k = 0; k < pg.size(); ++k) {
            const auto& c = cal.cell(i, k);
            write_csv_row(csv, {format_number(fg[i]), format_number(pg[k]), format_number(c.att_db),
                                std::to_string(c.code_oc), std::to_string(c.code_l1),
                                std::to_string(c.code_l2)});
        }
    }
    if (!csv) throw ConfigError("failed writing '" + csv_path + "'");

    const Json header{{"freq_grid", fg},
                      {"power_grid", pg},
                      {"d_const", cal.d_const()},
                      {"config_hash", cal.config_hash()},
                      {"agc_window", {{"low_code", cal.agc_window().low_code},
                                      {"high_code", cal.agc_window().high_code}}}};
    std::ofstream hdr(header_path);
    if (!hdr) throw ConfigError("cannot write '" + header_path + "'");
    hdr << header.dump(2) << '\n';
    if (!hdr) throw ConfigError("failed writing '" + header_path + "'");
}

CalibrationTable load_calibration(const std::string& csv_path, const std::string& header_path,
                                  const ChainConfig& chain) {
    const Json h = read_json_file(header_path);
    const std::string want = config_hash(chain);
    const std::string got = h.at("config_hash").get<std::string>();
    if (got != want) {
        throw ConfigError("calibration '" + header_path + "' was built for config " + got +
                          ", current config is " + want);
    }
    auto fg = h.at("freq_grid").get<std::vector<double>>();
    auto pg = h.at("power_grid").get<std::vector<double>>();
    const auto d = h.at("d_const").get<std::array<double, 3>>();
    const AgcWindow w{h.at("agc_window").at("low_code").get<int>(),
                      h.at("agc_window").at("high_code").get<int>()};

    const CsvTable t = read_csv(csv_path);
    const std::size_t cf = t.column_index("freq_hz");
    const std::size_t cp = t.column_index("power_dbm");
    const std::size_t ca = t.column_index("att_db");
    const std::size_t co = t.column_index("code_oc");
    const std::size_t c1 = t.column_index("code_l1");
    const std::size_t c2 = t.column_index("code_l2");
    if (t.rows.size() != fg.size() * pg.size()) {
        throw ConfigError("calibration '" + csv_path + "' has " + std::to_string(t.rows.size()) +
                          " rows, header expects " + std::to_string(fg.size() * pg.size()));
    }
    std::vector<CalibrationCell> cells(t.rows.size());
    std::vector<bool> filled(t.rows.size(), false);
    auto locate = [](const std::vector<double>& grid, double v) -> std::size_t {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::abs(grid[i] - v) <= 1e-9 * std::max(1.0, std::abs(v))) return i;
        }
        throw ConfigError("calibration row value " + format_number(v) + " is not on the grid");
    };
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::size_t idx = locate(fg, t.number(r, cf)) * pg.size() + locate(pg, t.number(r, cp));
        if (filled[idx]) throw ConfigError("calibration has a duplicate cell at row " + std::to_string(r + 1));
        filled[idx] = true;
        cells[idx] = {t.number(r, ca), static_cast<int>(t.number(r, co)),
                      static_cast<int>(t.number(r, c1)), static_cast<int>(t.number(r, c2))};
    }
    return CalibrationTable(std::move(fg), std::move(pg), std::move(cells), d, got, chain, w);
}

}  // namespace swsense
