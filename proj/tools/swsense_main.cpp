#include <iostream>

#include "CLI11.hpp"
#include "swsense/cli.hpp"

namespace {

int finish(const swsense::CommandResult& r) {
    for (const auto& p : r.artifact_paths) std::cerr << "wrote " << p << '\n';
    if (r.exit_code != 0) std::cerr << "error: " << r.message << '\n';
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Standing-wave interference detector simulator"};
    app.require_subcommand(1);

    swsense::GlobalOptions g;
    std::string config;
    std::uint64_t seed = 0;
    app.add_option("--config", config, "Configuration JSON (falls back to $SWSENSE_CONFIG)");
    app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "Override the scenario seed");

    swsense::SweepArgs sweep;
    auto* sw = app.add_subcommand("sweep-sparams", "Tap S-parameters, dissipation and package limits");
    sw->add_option("--f-start", sweep.f_start, "Hz")->capture_default_str();
    sw->add_option("--f-stop", sweep.f_stop, "Hz")->capture_default_str();
    sw->add_option("--f-step", sweep.f_step, "Hz")->capture_default_str();
    sw->add_option("--rc", sweep.r_c_values, "Coupling resistor values, ohm");

    auto* cal = app.add_subcommand("calibrate", "Build the calibration look-up table");

    swsense::EstimateArgs est;
    std::string est_input;
    std::string est_cal;
    std::vector<int> est_codes;
    auto* es = app.add_subcommand("estimate", "Invert tap codes into frequency and power");
    es->add_option("--input", est_input, "CSV with code_oc, code_l1, code_l2[, att_db]");
    es->add_option("--codes", est_codes, "Single reading: oc l1 l2")->expected(3);
    es->add_option("--att", est.att_db, "Attenuation for --codes, dB")->capture_default_str();
    es->add_option("--calibration", est_cal, "Stored calibration prefix (<prefix>.csv/.json)");

    swsense::ResolutionArgs res;
    auto* rs = app.add_subcommand("resolution", "ADC-limited frequency resolution per tap");
    rs->add_option("--f-start", res.f_start, "Hz")->capture_default_str();
    rs->add_option("--f-stop", res.f_stop, "Hz")->capture_default_str();
    rs->add_option("--f-step", res.f_step, "Hz")->capture_default_str();

    double f_max_1 = 16e9;
    double pct = 0.0025;
    auto* pn = app.add_subcommand("place-nodes", "Place the second tap for a resolution target");
    pn->add_option("f_max_1", f_max_1, "Bijective limit of the first tap, Hz")->capture_default_str();
    pn->add_option("max_pct", pct, "Relative resolution target as a fraction")->capture_default_str();

    std::string scenario;
    auto* sim = app.add_subcommand("simulate", "Run a scenario");
    sim->add_option("scenario", scenario, "Scenario JSON")->required();

    CLI11_PARSE(app, argc, argv);

    if (!config.empty()) g.config_path = config;
    if (*seed_opt) g.seed = seed;

    swsense::AppConfig cfg;
    try {
        cfg = swsense::resolve_config(g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (*sw) return finish(swsense::cmd_sweep_sparams(cfg, sweep, g.out_dir));
    if (*cal) return finish(swsense::cmd_calibrate(cfg, g.out_dir));
    if (*es) {
        if (!est_input.empty()) est.codes_csv = est_input;
        if (!est_codes.empty()) est.codes = est_codes;
        if (!est_cal.empty()) est.calibration_prefix = est_cal;
        return finish(swsense::cmd_estimate(cfg, est, g.out_dir, std::cout));
    }
    if (*rs) return finish(swsense::cmd_resolution(cfg, res, g.out_dir));
    if (*pn) return finish(swsense::cmd_place_nodes(cfg, f_max_1, pct, g.out_dir, std::cout));
    if (*sim) return finish(swsense::cmd_simulate(cfg, scenario, g.seed, g.out_dir, std::cout));
    return 2;
}
