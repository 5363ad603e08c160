#include "swsense/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "swsense/coupling.hpp"
#include "swsense/csv.hpp"
#include "swsense/error.hpp"
#include "swsense/estimator.hpp"
#include "swsense/sim.hpp"

#ifndef SWSENSE_DEFAULT_CONFIG
#define SWSENSE_DEFAULT_CONFIG ""
#endif

namespace fs = std::filesystem;

namespace swsense {

namespace {

std::vector<double> sweep(double start, double stop, double step) {
    if (!(step > 0.0) || stop < start) throw ConfigError("invalid sweep range");
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) v.push_back(start + step * static_cast<double>(i));
    return v;
}

std::ofstream open_out(const std::string& dir, const std::string& name, CommandResult& r) {
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / name).string();
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    r.artifact_paths.push_back(path);
    return os;
}

void close_checked(std::ofstream& os, const CommandResult& r) {
    os.close();
    if (!os) throw ConfigError("failed writing '" + r.artifact_paths.back() + "'");
}

std::string rc_label(double r_c) {
    std::ostringstream s;
    s << r_c;
    return s.str();
}

template <class F>
CommandResult guarded(F&& body) {
    CommandResult r;
    try {
        body(r);
    } catch (const std::exception& e) {
        r.exit_code = 1;
        r.message = e.what();
    }
    return r;
}

}  // namespace

std::string bundled_config_path() { return SWSENSE_DEFAULT_CONFIG; }

AppConfig resolve_config(const GlobalOptions& g) {
    if (g.config_path) return load_app_config(*g.config_path);
    if (const char* env = std::getenv("SWSENSE_CONFIG"); env && *env) return load_app_config(env);
    const std::string bundled = bundled_config_path();
    if (!bundled.empty() && fs::exists(bundled)) return load_app_config(bundled);
    return {};
}

CommandResult cmd_sweep_sparams(const AppConfig& cfg, const SweepArgs& args, const std::string& out_dir) {
    return guarded([&](CommandResult& r) {
        const auto freqs = sweep(args.f_start, args.f_stop, args.f_step);
        std::vector<double> rcs = args.r_c_values;
        if (rcs.empty()) rcs.push_back(cfg.chain.tap.r_c);
        for (double rc : rcs) {
            ResistiveTapParams p = cfg.chain.tap;
            p.r_c = rc;
            p.validate();
            const auto s = tap_sparams(p);
            auto os = open_out(out_dir, "sparams_rc" + rc_label(rc) + ".csv", r);
            os << kSparamsCsvHeader << '\n';
            for (double f : freqs) {
                write_csv_row(os, {format_number(f), format_number(s.s11_db), format_number(s.s21_db)});
            }
            close_checked(os, r);
        }
        {
            // Bare line: matched, lossless.
            auto os = open_out(out_dir, "sparams_no_tap.csv", r);
            os << kSparamsCsvHeader << '\n';
            for (double f : freqs) write_csv_row(os, {format_number(f), "-inf", "0"});
            close_checked(os, r);
        }
        {
            auto os = open_out(out_dir, "dissipation.csv", r);
            os << kDissipationCsvHeader << '\n';
            for (double p = -20.0; p <= 40.0 + 1e-9; p += 1.0) {
                write_csv_row(os, {format_number(p),
                                   format_number(tap_dissipation(cfg.chain.tap, PowerLevel(p)))});
            }
            close_checked(os, r);
        }
        {
            auto os = open_out(out_dir, "package_limits.csv", r);
            os << kPackageCsvHeader << '\n';
            for (double w : cfg.package_limits_w) {
                write_csv_row(os, {format_number(w),
                                   format_number(max_input_for_package(cfg.chain.tap, w).dbm())});
            }
            close_checked(os, r);
        }
    });
}

CommandResult cmd_calibrate(const AppConfig& cfg, const std::string& out_dir) {
    return guarded([&](CommandResult& r) {
        const auto window = cfg.controller.window(cfg.chain);
        const auto cal = build_calibration(cfg.chain, cfg.calibration_grid, window);
        fs::create_directories(out_dir);
        const std::string csv = (fs::path(out_dir) / "calibration.csv").string();
        const std::string hdr = (fs::path(out_dir) / "calibration.json").string();
        save_calibration(cal, csv, hdr);
        r.artifact_paths = {csv, hdr};
    });
}

CommandResult cmd_estimate(const AppConfig& cfg, const EstimateArgs& args, const std::string& out_dir,
                           std::ostream& out) {
    return guarded([&](CommandResult& r) {
        if (!args.codes_csv && !args.codes) throw ConfigError("estimate needs --codes or --input");
        CalibrationTable cal;
        if (args.calibration_prefix) {
            cal = load_calibration(*args.calibration_prefix + ".csv", *args.calibration_prefix + ".json",
                                   cfg.chain);
        } else {
            cal = build_calibration(cfg.chain, cfg.calibration_grid, cfg.controller.window(cfg.chain));
        }
        std::vector<TapCodes> readings;
        if (args.codes_csv) {
            const auto t = read_csv(*args.codes_csv);
            const auto co = t.column_index("code_oc");
            const auto c1 = t.column_index("code_l1");
            const auto c2 = t.column_index("code_l2");
            std::optional<std::size_t> ca;
            try {
                ca = t.column_index("att_db");
            } catch (const ConfigError&) {
            }
            for (std::size_t i = 0; i < t.rows.size(); ++i) {
                TapCodes c;
                c.code_oc = static_cast<int>(t.number(i, co));
                c.code_l1 = static_cast<int>(t.number(i, c1));
                c.code_l2 = static_cast<int>(t.number(i, c2));
                c.att_db = ca ? t.number(i, *ca) : args.att_db;
                readings.push_back(c);
            }
        } else {
            const auto& v = *args.codes;
            if (v.size() != 3) throw ConfigError("--codes takes exactly three values: oc l1 l2");
            readings.push_back({v[0], v[1], v[2], args.att_db, 0.0});
        }
        auto os = open_out(out_dir, "estimates.csv", r);
        os << kEstimateCsvHeader << '\n';
        int failures = 0;
        for (const auto& c : readings) {
            std::vector<std::string> row{std::to_string(c.code_oc), std::to_string(c.code_l1),
                                         std::to_string(c.code_l2), format_number(c.att_db)};
            try {
                const auto e = estimate(c, cal);
                row.insert(row.end(), {format_number(e.freq.hz()), format_number(e.power.dbm()),
                                       std::string(to_string(e.tap_used)),
                                       std::string(to_string(e.confidence))});
            } catch (const Error& e) {
                ++failures;
                std::string what = e.what();
                std::replace(what.begin(), what.end(), ',', ';');
                row.insert(row.end(), {"nan", "nan", "", what});
            }
            write_csv_row(os, row);
            if (!args.codes_csv) {
                out << "freq_hz " << row[4] << "\npower_dbm " << row[5] << "\ntap_used " << row[6]
                    << "\nconfidence " << row[7] << '\n';
            }
        }
        close_checked(os, r);
        if (failures) {
            r.exit_code = 1;
            r.message = std::to_string(failures) + " reading(s) could not be estimated";
        }
    });
}

CommandResult cmd_resolution(const AppConfig& cfg, const ResolutionArgs& args, const std::string& out_dir) {
    return guarded([&](CommandResult& r) {
        const auto freqs = sweep(args.f_start, args.f_stop, args.f_step);
        auto os = open_out(out_dir, "resolution.csv", r);
        os << kResolutionCsvHeader << '\n';
        for (const auto& tap : cfg.chain.stub.taps) {
            for (double f : freqs) {
                if (f > tap.f_max) break;
                const double res =
                    resolution(Frequency(f), Frequency(tap.f_max), cfg.chain.detector, cfg.chain.adc);
                write_csv_row(os, {tap.name, format_number(f * 1e-9), format_number(res * 1e-9),
                                   format_number(100.0 * res / f)});
            }
        }
        close_checked(os, r);
    });
}

CommandResult cmd_place_nodes(const AppConfig& cfg, double f_max_1, double max_pct,
                              const std::string& out_dir, std::ostream& out) {
    return guarded([&](CommandResult& r) {
        const auto p = place_nodes(Frequency(f_max_1), max_pct, cfg.chain.detector, cfg.chain.adc);
        out << std::scientific << std::setprecision(4) << "f_max_2 " << p.f_max_2.hz() << "\nf_min "
            << p.f_min.hz() << '\n'
            << std::defaultfloat;
        auto os = open_out(out_dir, "placement.json", r);
        os << Json{{"f_max_1", f_max_1},
                   {"max_pct", max_pct},
                   {"f_max_2", p.f_max_2.hz()},
                   {"f_min", p.f_min.hz()}}
                  .dump(2)
           << '\n';
        close_checked(os, r);
    });
}

CommandResult cmd_simulate(const AppConfig& cfg, const std::string& scenario_path,
                           std::optional<std::uint64_t> seed, const std::string& out_dir,
                           std::ostream& out) {
    return guarded([&](CommandResult& r) {
        Scenario sc = load_scenario(scenario_path, cfg);
        if (seed) sc.seed = *seed;
        for (const auto& st : sc.stages) {
            for (const auto& w : st.controller.warnings()) out << "warning: " << w << '\n';
        }
        const auto result = run(sc);
        {
            auto os = open_out(out_dir, "trace.csv", r);
            write_trace_csv(os, result.trace);
            close_checked(os, r);
        }
        if (!result.trace.snapshots.empty()) {
            auto os = open_out(out_dir, "snapshots.csv", r);
            write_snapshots_csv(os, result.trace);
            close_checked(os, r);
        }
        Json metrics = to_json(result.metrics);
        metrics["seed"] = sc.seed;
        const auto& diag = result.trace.diagnostics;
        metrics["diagnostic_count"] = diag.size();
        metrics["diagnostics"] =
            std::vector<std::string>(diag.begin(), diag.begin() + std::min<std::ptrdiff_t>(diag.size(), 20));
        auto os = open_out(out_dir, "metrics.json", r);
        os << metrics.dump(2) << '\n';
        close_checked(os, r);
        out << metrics.dump(2) << '\n';
    });
}

}  // namespace swsense
