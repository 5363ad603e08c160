// Python bindings. Configuration crosses the boundary as JSON text; the
// package wrapper turns dicts into text and back.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "swsense/agc.hpp"
#include "swsense/config_io.hpp"
#include "swsense/coupling.hpp"
#include "swsense/error.hpp"
#include "swsense/estimator.hpp"
#include "swsense/sim.hpp"

namespace py = pybind11;
using namespace swsense;

namespace {

AppConfig parse_config(const std::string& text) {
    if (text.empty()) return {};
    try {
        return app_config_from_json(Json::parse(text));
    } catch (const Json::exception& e) {
        throw ConfigError(e.what());
    }
}

py::dict estimate_dict(const Estimate& e) {
    py::dict d;
    d["freq_hz"] = e.freq.hz();
    d["power_dbm"] = e.power.dbm();
    d["tap_used"] = std::string(to_string(e.tap_used));
    d["confidence"] = std::string(to_string(e.confidence));
    return d;
}

py::tuple codes_tuple(const TapCodes& c) { return py::make_tuple(c.code_oc, c.code_l1, c.code_l2, c.att_db); }

}  // namespace

PYBIND11_MODULE(_swsense, m) {
    m.doc() = "Standing-wave interference detector simulator (native core)";

    static py::exception<Error> base(m, "SwsenseError", PyExc_RuntimeError);
    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    m.def("default_config", [] { return to_json(AppConfig{}).dump(); });
    m.def("config_hash", [](const std::string& cfg) { return config_hash(parse_config(cfg).chain); },
          py::arg("config") = "");

    m.def(
        "tap_sparams",
        [](double r_c, double z0) {
            ResistiveTapParams p;
            p.r_c = r_c;
            p.z0 = z0;
            p.validate();
            const auto s = tap_sparams(p);
            return py::make_tuple(tap_coupling(p), s.s11_db, s.s21_db);
        },
        py::arg("r_c") = 220.0, py::arg("z0") = 50.0, "(coupling_db, s11_db, s21_db)");

    m.def(
        "tap_dissipation",
        [](double p_in_dbm, double r_c, double z0) {
            ResistiveTapParams p;
            p.r_c = r_c;
            p.z0 = z0;
            p.validate();
            return tap_dissipation(p, PowerLevel(p_in_dbm));
        },
        py::arg("p_in_dbm"), py::arg("r_c") = 220.0, py::arg("z0") = 50.0);

    m.def(
        "resolution",
        [](double f, double f_max, const std::string& cfg) {
            const auto c = parse_config(cfg).chain;
            return resolution(Frequency(f), Frequency(f_max), c.detector, c.adc);
        },
        py::arg("f"), py::arg("f_max"), py::arg("config") = "");

    m.def(
        "place_nodes",
        [](double f_max_1, double max_pct, const std::string& cfg) {
            const auto c = parse_config(cfg).chain;
            const auto p = place_nodes(Frequency(f_max_1), max_pct, c.detector, c.adc);
            return py::make_tuple(p.f_max_2.hz(), p.f_min.hz());
        },
        py::arg("f_max_1"), py::arg("max_pct"), py::arg("config") = "", "(f_max_2, f_min)");

    m.def(
        "readout",
        [](const std::vector<std::pair<double, double>>& lines_dbm, const std::string& cfg, bool agc) {
            const auto app = parse_config(cfg);
            std::vector<SpectralLine> lines;
            for (const auto& [f, p] : lines_dbm) lines.push_back({f, dbm_to_watts(p)});
            if (agc) return codes_tuple(settle_agc(lines, app.chain, app.controller.window(app.chain)).codes);
            return codes_tuple(readout_lines(lines, app.chain, 0.0));
        },
        py::arg("lines"), py::arg("config") = "", py::arg("agc") = true,
        "Codes (oc, l1, l2, att_db) for [(freq_hz, power_dbm), ...]");

    py::class_<CalibrationTable>(m, "Calibration")
        .def(py::init([](const std::string& cfg) {
                 const auto app = parse_config(cfg);
                 return build_calibration(app.chain, app.calibration_grid, app.controller.window(app.chain));
             }),
             py::arg("config") = "")
        .def_property_readonly("config_hash", &CalibrationTable::config_hash)
        .def_property_readonly("freq_grid", &CalibrationTable::freq_grid)
        .def_property_readonly("power_grid", &CalibrationTable::power_grid)
        .def(
            "estimate",
            [](const CalibrationTable& t, int oc, int l1, int l2, double att_db) {
                return estimate_dict(estimate({oc, l1, l2, att_db, 0.0}, t));
            },
            py::arg("code_oc"), py::arg("code_l1"), py::arg("code_l2"), py::arg("att_db") = 0.0);

    m.def(
        "simulate",
        [](const std::string& scenario, const std::string& cfg, std::optional<std::uint64_t> seed) {
            Scenario sc;
            try {
                sc = scenario_from_json(Json::parse(scenario), parse_config(cfg));
            } catch (const Json::exception& e) {
                throw ConfigError(e.what());
            }
            if (seed) sc.seed = *seed;
            RunResult r;
            {
                py::gil_scoped_release nogil;
                r = run(sc);
            }
            std::ostringstream trace;
            write_trace_csv(trace, r.trace);
            Json metrics = to_json(r.metrics);
            metrics["diagnostic_count"] = r.trace.diagnostics.size();
            return py::make_tuple(metrics.dump(), trace.str());
        },
        py::arg("scenario"), py::arg("config") = "", py::arg("seed") = py::none(),
        "(metrics_json, trace_csv)");
}
