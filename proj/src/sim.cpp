#include "swsense/sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "swsense/csv.hpp"
#include "swsense/error.hpp"

namespace swsense {

namespace {

using Ticks = std::int64_t;
constexpr double kTicksPerSecond = 1e12;
constexpr Ticks kNever = std::numeric_limits<Ticks>::max();

Ticks to_ticks(double s) { return static_cast<Ticks>(std::llround(s * kTicksPerSecond)); }
double to_seconds(Ticks t) { return static_cast<double>(t) / kTicksPerSecond; }

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

double sum_dbm(double watts) {
    return watts > 0.0 ? watts_to_dbm(watts) : -std::numeric_limits<double>::infinity();
}

GridSpec stage_grid(const StageSpec& st) {
    if (st.calibration_grid) return *st.calibration_grid;
    GridSpec g;
    if (st.chain.coupling_kind == CouplingKind::coupler) {
        g.f_start = std::max(g.f_start, st.chain.coupler.f_min);
        g.f_stop = std::min(g.f_stop, st.chain.coupler.f_max);
    }
    return g;
}

struct Line {
    std::size_t tone = 0;
    double freq_hz = 0.0;
    double watts = 0.0;
};

// Tone lines at their source power fraction, computed once.
struct SourceLines {
    std::vector<std::vector<SpectralLine>> per_tone;
};

struct StagePower {
    std::vector<Line> in;
    std::vector<double> in_tone_w;
    std::vector<double> out_tone_w;
    /// Tone power at the filter input, after the sampling network.
    std::vector<double> filter_tone_w;
};

class Engine {
public:
    Engine(const Scenario& sc, CalibrationCache& cache) : sc_(sc) {
        for (const auto& t : sc.sources) src_.per_tone.push_back(expand_modulated(t));
        std::mt19937_64 rng(sc.seed);
        for (const auto& spec : sc.stages) {
            StageRt st;
            st.spec = &spec;
            st.window = spec.controller.window(spec.chain);
            st.cal = cache.get(spec.chain, stage_grid(spec), st.window);
            st.ts = to_ticks(spec.chain.adc.sample_period());
            st.clk = to_ticks(spec.controller.clock_period);
            std::uniform_int_distribution<Ticks> phase(0, st.ts - 1);
            st.next_capture = phase(rng);
            st.last_codes.t = nan();
            st.f_est = nan();
            st.p_est = nan();
            stages_.push_back(std::move(st));
        }
    }

    TraceRecord run() {
        TraceRecord tr;
        tr.dt = sc_.dt;
        tr.clock_period = sc_.stages.front().controller.clock_period;
        tr.sources = sc_.sources;
        const Ticks dt = to_ticks(sc_.dt);
        const auto n_steps =
            static_cast<std::size_t>(std::floor(sc_.duration / sc_.dt + 1e-9));
        tr.steps.reserve(n_steps);

        std::vector<Ticks> snaps;
        for (double s : sc_.snapshot_times) snaps.push_back(to_ticks(s));
        std::sort(snaps.begin(), snaps.end());
        std::size_t next_snap = 0;

        for (std::size_t n = 0; n < n_steps; ++n) {
            const Ticks t = static_cast<Ticks>(n) * dt;
            advance_to(t, tr);
            while (next_snap < snaps.size() && snaps[next_snap] <= t) {
                advance_to(snaps[next_snap], tr);
                tr.snapshots.push_back(snapshot(snaps[next_snap]));
                ++next_snap;
            }
            tr.steps.push_back(log_step(t));
        }
        return tr;
    }

private:
    struct StageRt {
        const StageSpec* spec = nullptr;
        AgcWindow window;
        std::shared_ptr<const CalibrationTable> cal;
        Ticks ts = 0;
        Ticks clk = 0;
        Ticks next_capture = 0;
        std::deque<std::pair<Ticks, TapCodes>> in_flight;
        ControllerState ctrl;
        FilterState filter;
        double att_phys = 0.0;
        TapCodes last_codes;
        double f_est = 0.0;
        double p_est = 0.0;
        std::string pending_labels;
    };

    struct Effect {
        std::size_t stage;
        Action action;
    };

    std::vector<StagePower> evaluate(Ticks tk) const {
        const double t = to_seconds(tk);
        const std::size_t n_tones = sc_.sources.size();
        std::vector<StagePower> out(stages_.size());
        std::vector<Line> lines;
        for (std::size_t i = 0; i < n_tones; ++i) {
            if (!sc_.sources[i].active_at(t)) continue;
            for (const auto& l : src_.per_tone[i]) lines.push_back({i, l.freq_hz, l.watts});
        }
        for (std::size_t k = 0; k < stages_.size(); ++k) {
            const auto& st = stages_[k];
            const auto& chain = st.spec->chain;
            auto& sp = out[k];
            sp.in = lines;
            sp.in_tone_w.assign(n_tones, 0.0);
            sp.out_tone_w.assign(n_tones, 0.0);
            sp.filter_tone_w.assign(n_tones, 0.0);
            std::vector<double> after_net(lines.size());
            for (std::size_t i = 0; i < lines.size(); ++i) {
                sp.in_tone_w[lines[i].tone] += lines[i].watts;
                after_net[i] = lines[i].watts * db_to_power_ratio(-through_loss_db(chain, lines[i].freq_hz));
                sp.filter_tone_w[lines[i].tone] += after_net[i];
            }
            std::vector<Line> next;
            next.reserve(lines.size());
            for (std::size_t i = 0; i < lines.size(); ++i) {
                const double w_tone = sp.filter_tone_w[lines[i].tone];
                double w = after_net[i];
                if (w > 0.0 && st.filter.effective_at(t)) {
                    w *= db_to_power_ratio(notch_s21_db(st.spec->filter, st.filter,
                                                        Frequency(lines[i].freq_hz),
                                                        PowerLevel::from_watts(w_tone), t));
                }
                sp.out_tone_w[lines[i].tone] += w;
                next.push_back({lines[i].tone, lines[i].freq_hz, w});
            }
            lines = std::move(next);
        }
        return out;
    }

    TapCodes capture(std::size_t k, Ticks tk) const {
        const double t = to_seconds(tk);
        const auto& st = stages_[k];
        const auto& chain = st.spec->chain;
        const auto powers = evaluate(tk);
        const auto& sp = powers[k];
        std::vector<SpectralLine> seen;
        seen.reserve(sp.in.size());
        for (const auto& l : sp.in) {
            if (!(l.watts > 0.0)) continue;
            const Frequency f(l.freq_hz);
            const double g = stopband_gamma(st.spec->filter, st.filter, f,
                                            PowerLevel::from_watts(sp.filter_tone_w[l.tone]), t);
            const double amp = sampled_forward_amplitude(chain.coupling_kind, std::complex<double>(g, 0.0),
                                                         st.spec->electrical_delay, f, chain.coupler);
            seen.push_back({l.freq_hz, l.watts * amp * amp});
        }
        return readout_lines(seen, chain, st.att_phys, t);
    }

    void apply(const Effect& e, Ticks tk, TraceRecord& tr) {
        auto& st = stages_[e.stage];
        const double t = to_seconds(tk);
        switch (e.action.kind) {
            case ActionKind::tune_filter: {
                const bool was = st.filter.engaged;
                try {
                    st.filter = tune(st.spec->filter, st.filter, Frequency(e.action.freq_hz), t);
                } catch (const TuningRangeError& err) {
                    tr.diagnostics.push_back("stage " + std::to_string(e.stage) + " t=" +
                                             format_number(t) + ": " + err.what());
                    break;
                }
                if (!was) tr.toggles.push_back({e.stage, t, true});
                break;
            }
            case ActionKind::release_filter:
                if (st.filter.engaged) tr.toggles.push_back({e.stage, t, false});
                st.filter = release(st.filter);
                break;
            case ActionKind::set_attenuation:
                st.att_phys = e.action.att_db;
                break;
            case ActionKind::flag:
                break;
        }
    }

    void deliver(std::size_t k, Ticks tk, TraceRecord& tr) {
        auto& st = stages_[k];
        const TapCodes codes = st.in_flight.front().second;
        st.in_flight.pop_front();
        const auto out = on_sample(codes, st.ctrl, st.spec->controller, *st.cal, to_seconds(tk));
        st.ctrl = out.state;
        st.last_codes = codes;
        st.f_est = out.f_est_hz;
        st.p_est = out.p_est_dbm;
        if (!out.diagnostic.empty() && out.diagnostic != "agc overrange") {
            tr.diagnostics.push_back("stage " + std::to_string(k) + " t=" +
                                     format_number(to_seconds(tk)) + ": " + out.diagnostic);
        }
        const Ticks eff = tk + st.clk;
        if (eff <= to_ticks(codes.t)) throw std::logic_error("action effect precedes its sample");
        for (auto a : out.actions) {
            a.decided_at = to_seconds(tk);
            a.effective_at = to_seconds(eff);
            effects_.emplace(eff, Effect{k, a});
            tr.actions.push_back({k, a, codes.t});
            if (!st.pending_labels.empty()) st.pending_labels += '|';
            st.pending_labels += a.label();
        }
    }

    // Processes every event with time <= t: effects, then captures, then
    // deliveries at equal instants.
    void advance_to(Ticks t, TraceRecord& tr) {
        while (true) {
            const Ticks te = effects_.empty() ? kNever : effects_.begin()->first;
            Ticks tc = kNever;
            Ticks td = kNever;
            for (const auto& st : stages_) {
                tc = std::min(tc, st.next_capture);
                if (!st.in_flight.empty()) td = std::min(td, st.in_flight.front().first);
            }
            const Ticks now = std::min({te, tc, td});
            if (now > t) return;
            if (te == now) {
                while (!effects_.empty() && effects_.begin()->first == now) {
                    const Effect e = effects_.begin()->second;
                    effects_.erase(effects_.begin());
                    apply(e, now, tr);
                }
            } else if (tc == now) {
                for (std::size_t k = 0; k < stages_.size(); ++k) {
                    auto& st = stages_[k];
                    if (st.next_capture != now) continue;
                    st.in_flight.emplace_back(now + st.ts, capture(k, now));
                    st.next_capture += st.ts;
                }
            } else {
                for (std::size_t k = 0; k < stages_.size(); ++k) {
                    if (!stages_[k].in_flight.empty() && stages_[k].in_flight.front().first == now) {
                        deliver(k, now, tr);
                    }
                }
            }
        }
    }

    Snapshot snapshot(Ticks tk) const {
        const auto p = evaluate(tk);
        Snapshot s;
        s.t = to_seconds(tk);
        for (double w : p.front().in_tone_w) s.in_dbm.push_back(sum_dbm(w));
        for (double w : p.back().out_tone_w) s.out_dbm.push_back(sum_dbm(w));
        return s;
    }

    TraceStep log_step(Ticks tk) {
        const auto p = evaluate(tk);
        const double t = to_seconds(tk);
        TraceStep step;
        step.t = t;
        for (std::size_t k = 0; k < stages_.size(); ++k) {
            auto& st = stages_[k];
            StageStep s;
            for (double w : p[k].in_tone_w) s.in_dbm.push_back(sum_dbm(w));
            for (double w : p[k].out_tone_w) s.out_dbm.push_back(sum_dbm(w));
            s.filter = st.filter;
            s.filter_effective = st.filter.effective_at(t);
            s.att_db = st.att_phys;
            s.codes = st.last_codes;
            s.f_est_hz = st.f_est;
            s.p_est_dbm = st.p_est;
            s.mode = st.ctrl.mode;
            s.action = std::move(st.pending_labels);
            st.pending_labels.clear();
            step.stages.push_back(std::move(s));
        }
        return step;
    }

    const Scenario& sc_;
    SourceLines src_;
    std::vector<StageRt> stages_;
    std::multimap<Ticks, Effect> effects_;
};

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

void Scenario::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("scenario duration must be positive");
    if (!(dt > 0.0) || to_ticks(dt) <= 0) throw ConfigError("scenario dt must be at least 1 ps");
    if (stages.empty()) throw ConfigError("scenario needs at least one stage");
    for (std::size_t i = 0; i < sources.size(); ++i) {
        try {
            sources[i].validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("source " + std::to_string(i) + ": " + e.what());
        }
    }
    for (std::size_t k = 0; k < stages.size(); ++k) {
        const auto& st = stages[k];
        const std::string where = "stage " + std::to_string(k) + ": ";
        try {
            st.chain.validate();
            st.controller.validate();
            st.filter.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
        const double ts = st.chain.adc.sample_period();
        if (dt > ts / 4.0 * (1.0 + 1e-9)) {
            std::ostringstream msg;
            msg << where << "dt " << dt << " s exceeds a quarter of the ADC sample period (" << ts
                << " s)";
            throw ConfigError(msg.str());
        }
        if (!(st.electrical_delay >= 0.0)) throw ConfigError(where + "electrical_delay must be >= 0");
        if (st.chain.coupling_kind == CouplingKind::coupler) {
            for (const auto& src : sources) {
                for (const auto& l : expand_modulated(src)) {
                    if (l.freq_hz < st.chain.coupler.f_min || l.freq_hz > st.chain.coupler.f_max) {
                        std::ostringstream msg;
                        msg << where << "source line at " << l.freq_hz
                            << " Hz is outside the coupler band";
                        throw ConfigError(msg.str());
                    }
                }
            }
        }
        const GridSpec g = stage_grid(st);
        const auto f = g.freqs();
        if (f.back() > st.chain.stub.taps.front().f_max * (1.0 + 1e-12)) {
            throw ConfigError(where + "calibration grid exceeds the l1 bijective limit");
        }
        if (st.chain.coupling_kind == CouplingKind::coupler &&
            (f.front() < st.chain.coupler.f_min || f.back() > st.chain.coupler.f_max)) {
            throw ConfigError(where + "calibration grid extends outside the coupler band");
        }
    }
    for (double s : snapshot_times) {
        if (!(s >= 0.0 && s < duration)) throw ConfigError("snapshot time outside [0, duration)");
    }
}

Json to_json(const Scenario& sc) {
    Json sources = Json::array();
    for (const auto& t : sc.sources) sources.push_back(to_json(t));
    Json stages = Json::array();
    for (const auto& st : sc.stages) {
        Json s{{"chain", to_json(st.chain)},
               {"controller", to_json(st.controller)},
               {"filter", to_json(st.filter)},
               {"coupling_kind", std::string(to_string(st.chain.coupling_kind))},
               {"electrical_delay", st.electrical_delay}};
        if (st.calibration_grid) s["calibration_grid"] = to_json(*st.calibration_grid);
        stages.push_back(std::move(s));
    }
    return {{"duration_s", sc.duration}, {"dt_s", sc.dt},       {"seed", sc.seed},
            {"sources", sources},        {"stages", stages},    {"snapshot_times", sc.snapshot_times}};
}

Scenario scenario_from_json(const Json& j, const AppConfig& defaults) {
    if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
    static const std::set<std::string> top{"duration_s", "dt_s", "seed", "sources", "stages",
                                           "snapshot_times", "description"};
    static const std::set<std::string> stage_keys{"chain",         "controller",       "filter",
                                                  "coupling_kind", "electrical_delay", "calibration_grid"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!top.count(it.key())) throw ConfigError("scenario: unknown field '" + it.key() + "'");
    }
    Scenario sc;
    try {
        sc.duration = j.at("duration_s").get<double>();
        sc.dt = j.value("dt_s", 25e-9);
        sc.seed = j.value("seed", std::uint64_t{1});
        if (auto it = j.find("sources"); it != j.end()) {
            for (const auto& t : *it) sc.sources.push_back(tone_from_json(t));
        }
        if (auto it = j.find("snapshot_times"); it != j.end()) {
            sc.snapshot_times = it->get<std::vector<double>>();
        }
        const Json stages = j.value("stages", Json::array({Json::object()}));
        for (const auto& s : stages) {
            if (!s.is_object()) throw ConfigError("scenario: stages[] entries must be objects");
            for (auto it = s.begin(); it != s.end(); ++it) {
                if (!stage_keys.count(it.key())) throw ConfigError("stage: unknown field '" + it.key() + "'");
            }
            StageSpec st;
            Json chain = to_json(defaults.chain);
            if (auto it = s.find("chain"); it != s.end()) chain.merge_patch(*it);
            if (auto it = s.find("coupling_kind"); it != s.end()) chain["coupling_kind"] = *it;
            st.chain = chain_from_json(chain);
            Json ctrl = to_json(defaults.controller);
            if (auto it = s.find("controller"); it != s.end()) ctrl.merge_patch(*it);
            st.controller = controller_from_json(ctrl);
            st.filter = notch_from_json(s.value("filter", Json::object()));
            st.electrical_delay = s.value("electrical_delay", 0.0);
            if (auto it = s.find("calibration_grid"); it != s.end()) {
                st.calibration_grid = grid_from_json(*it);
            }
            sc.stages.push_back(std::move(st));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::string& path, const AppConfig& defaults) {
    return scenario_from_json(read_json_file(path), defaults);
}

std::shared_ptr<const CalibrationTable> CalibrationCache::get(const ChainConfig& chain,
                                                               const GridSpec& grid,
                                                               const AgcWindow& window) {
    const std::string key = config_hash(chain) + to_json(grid).dump() + ":" +
                            std::to_string(window.low_code) + ":" + std::to_string(window.high_code);
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;
    auto table = std::make_shared<const CalibrationTable>(build_calibration(chain, grid, window));
    tables_.emplace(key, table);
    return table;
}

RunResult run(const Scenario& sc, CalibrationCache* cache) {
    sc.validate();
    CalibrationCache local;
    Engine engine(sc, cache ? *cache : local);
    RunResult r;
    r.trace = engine.run();
    r.metrics = compute_metrics(r.trace);
    return r;
}

double measure_response_time(const TraceRecord& tr, Edge edge) {
    const double duration = static_cast<double>(tr.steps.size()) * tr.dt;
    std::set<double> edges;
    for (const auto& s : tr.sources) {
        const double e = edge == Edge::rise ? s.t_on : s.t_off;
        if (e > 0.0 && e < duration) edges.insert(e);
    }
    const char* name = edge == Edge::rise ? "rising" : "falling";
    if (edges.empty()) throw Error(std::string("no ") + name + " source edge in trace");
    if (edges.size() > 1) throw Error(std::string("more than one ") + name + " source edge in trace");
    const double t_edge = *edges.begin();
    const ActionKind want = edge == Edge::rise ? ActionKind::tune_filter : ActionKind::release_filter;
    for (const auto& a : tr.actions) {
        if (a.stage == 0 && a.action.kind == want && a.sample_t >= t_edge) {
            return a.action.effective_at - t_edge;
        }
    }
    throw Error(std::string("no filter action follows the ") + name + " edge");
}

LimitCycle detect_limit_cycle(const TraceRecord& tr) {
    const double duration = static_cast<double>(tr.steps.size()) * tr.dt;
    if (duration <= 10.0 * tr.clock_period) return {};
    std::set<std::size_t> stages;
    for (const auto& t : tr.toggles) stages.insert(t.stage);
    for (std::size_t k : stages) {
        std::vector<double> engages;
        int toggles = 0;
        for (const auto& t : tr.toggles) {
            if (t.stage != k) continue;
            ++toggles;
            if (t.engaged) engages.push_back(t.t);
        }
        if (toggles < 4 || engages.size() < 2) continue;
        std::vector<double> iv;
        for (std::size_t i = 1; i < engages.size(); ++i) iv.push_back(engages[i] - engages[i - 1]);
        const double m = mean(iv);
        double var = 0.0;
        for (double x : iv) var += (x - m) * (x - m);
        var /= static_cast<double>(iv.size());
        if (m > 0.0 && std::sqrt(var) / m < 0.2) return {true, m};
    }
    return {};
}

Metrics compute_metrics(const TraceRecord& tr) {
    Metrics m;
    try {
        m.response_time_engage = measure_response_time(tr, Edge::rise);
    } catch (const Error&) {
    }
    try {
        m.response_time_release = measure_response_time(tr, Edge::fall);
    } catch (const Error&) {
    }
    const std::size_t n_tones = tr.sources.size();
    m.suppression_db.assign(n_tones, nan());
    m.max_output_power_dbm = -std::numeric_limits<double>::infinity();
    for (const auto& step : tr.steps) {
        if (step.stages.empty()) continue;
        const auto& first = step.stages.front();
        const auto& last = step.stages.back();
        double total = 0.0;
        for (std::size_t i = 0; i < n_tones; ++i) {
            if (std::isfinite(first.in_dbm[i])) m.suppression_db[i] = first.in_dbm[i] - last.out_dbm[i];
            if (std::isfinite(last.out_dbm[i])) total += dbm_to_watts(last.out_dbm[i]);
        }
        m.max_output_power_dbm = std::max(m.max_output_power_dbm, sum_dbm(total));
    }
    const auto lc = detect_limit_cycle(tr);
    m.limit_cycle = lc.present;
    m.limit_cycle_period = lc.period;
    return m;
}

void write_trace_csv(std::ostream& os, const TraceRecord& tr) {
    os << kTraceCsvHeader;
    for (std::size_t i = 0; i < tr.sources.size(); ++i) os << ",in_dbm_" << i << ",out_dbm_" << i;
    os << '\n';
    for (const auto& step : tr.steps) {
        for (std::size_t k = 0; k < step.stages.size(); ++k) {
            const auto& s = step.stages[k];
            std::vector<std::string> row{format_number(step.t),
                                         std::to_string(k),
                                         std::to_string(s.codes.code_oc),
                                         std::to_string(s.codes.code_l1),
                                         std::to_string(s.codes.code_l2),
                                         format_number(s.att_db),
                                         format_number(s.f_est_hz),
                                         format_number(s.p_est_dbm),
                                         std::string(to_string(s.mode)),
                                         s.action,
                                         s.filter_effective ? "1" : "0",
                                         format_number(s.filter.engaged ? s.filter.f_center : 0.0)};
            for (std::size_t i = 0; i < s.in_dbm.size(); ++i) {
                row.push_back(format_number(s.in_dbm[i]));
                row.push_back(format_number(s.out_dbm[i]));
            }
            write_csv_row(os, row);
        }
    }
}

void write_snapshots_csv(std::ostream& os, const TraceRecord& tr) {
    os << "t_s,tone,freq_hz,in_dbm,out_dbm\n";
    for (const auto& s : tr.snapshots) {
        for (std::size_t i = 0; i < s.in_dbm.size(); ++i) {
            write_csv_row(os, {format_number(s.t), std::to_string(i),
                               format_number(tr.sources[i].freq.hz()), format_number(s.in_dbm[i]),
                               format_number(s.out_dbm[i])});
        }
    }
}

Json to_json(const Metrics& m) {
    auto num = [](double v) -> Json { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    Json supp = Json::array();
    for (double v : m.suppression_db) supp.push_back(num(v));
    Json j{{"response_time_engage", m.response_time_engage ? Json(*m.response_time_engage) : Json(nullptr)},
           {"response_time_release", m.response_time_release ? Json(*m.response_time_release) : Json(nullptr)},
           {"suppression_db", supp},
           {"limit_cycle", m.limit_cycle},
           {"limit_cycle_period", m.limit_cycle_period},
           {"max_output_power_dbm", num(m.max_output_power_dbm)}};
    j["response_time"] = j["response_time_engage"];
    return j;
}

}  // namespace swsense
