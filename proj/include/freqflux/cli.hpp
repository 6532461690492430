/*
   Copyright 2026 The freqflux Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Command-line front end. Exit codes: 0 success, 2 usage, 3 input,
// 4 numerical, 5 I/O.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freqflux/case_io.hpp"
#include "freqflux/coi.hpp"
#include "freqflux/csv.hpp"
#include "freqflux/diagnostics.hpp"
#include "freqflux/dynsim.hpp"
#include "freqflux/errors.hpp"
#include "freqflux/netmodel.hpp"
#include "freqflux/powerflow.hpp"
#include "freqflux/sensitivity.hpp"
#include "freqflux/stochastic.hpp"

namespace freqflux::cli {

enum ExitCode : int { ok = 0, usage = 2, input = 3, numerical = 4, io = 5 };

inline int exit_code_for(const Error& e) {
    switch (e.error_class()) {
        case ErrorClass::input: return input;
        case ErrorClass::numerical: return numerical;
        case ErrorClass::io: return io;
    }
    return input;
}

struct Globals {
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out_dir = ".";
};

/// Parses "ramp:bus=4,rate=0.1,t0=10,dur=10[,q=0.2]" or
/// "step:bus=4,size=0.1,t0=1[,q=0.2]". Bus ids are 1-based.
inline Event parse_event(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw Error(ErrorKind::invalid_argument, "event '" + spec + "' must look like kind:key=value,...");
    }
    const std::string kind = spec.substr(0, colon);
    std::map<std::string, double> kv;
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::invalid_argument, "bad event field '" + item + "'");
        try {
            std::size_t used = 0;
            const std::string val = item.substr(eq + 1);
            kv[item.substr(0, eq)] = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw Error(ErrorKind::invalid_argument, "bad number in event field '" + item + "'");
        }
    }
    auto need = [&](const char* key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw Error(ErrorKind::invalid_argument, "event '" + spec + "' lacks " + key);
        return it->second;
    };
    Event ev;
    const double bus = need("bus");
    if (bus < 1.0 || bus != std::floor(bus)) throw Error(ErrorKind::invalid_argument, "event bus must be a 1-based id");
    ev.bus = static_cast<std::size_t>(bus) - 1;
    ev.t_start = need("t0");
    ev.q_ratio = kv.count("q") ? kv["q"] : 0.0;
    if (kind == "ramp") {
        ev.kind = EventKind::load_ramp;
        ev.p_rate = need("rate");
        ev.duration = need("dur");
    } else if (kind == "step") {
        ev.kind = EventKind::load_step;
        ev.p_step = need("size");
    } else {
        throw Error(ErrorKind::invalid_argument, "unknown event kind '" + kind + "'");
    }
    return ev;
}

namespace detail {

inline std::string bus_label(std::size_t i) { return std::to_string(i + 1); }

inline std::vector<std::string> stats_cells(const std::string& label, const StatsReport& r) {
    return {label,
            std::to_string(r.n),
            format_number(r.mean),
            format_number(r.variance),
            format_number(r.skewness),
            format_number(r.excess_kurtosis),
            format_number(r.jb_stat),
            format_number(r.jb_p),
            format_number(r.ks_stat),
            format_number(r.ks_p)};
}

inline std::vector<std::string> stats_header() {
    return {"series", "n", "mean_pu", "variance_pu2", "skewness", "excess_kurtosis",
            "jb_stat", "jb_p", "ks_stat", "ks_p"};
}

inline CsvTable qq_table(const StatsReport& r) {
    CsvTable t({"theoretical_std_normal", "empirical"});
    for (const auto& p : r.qq) t.row(std::vector<double>{p.theoretical, p.empirical});
    return t;
}

inline CsvTable histogram_table(const StatsReport& r) {
    CsvTable t({"bin_lo", "bin_hi", "count"});
    for (std::size_t b = 0; b < r.histogram.counts.size(); ++b) {
        t.row(std::vector<std::string>{format_number(r.histogram.edges[b]),
                                       format_number(r.histogram.edges[b + 1]),
                                       std::to_string(r.histogram.counts[b])});
    }
    return t;
}

inline CsvTable dominance_table(const std::vector<DominanceRow>& rows) {
    CsvTable t({"rank", "bus", "component", "weight_pu_per_pu", "variance_pu2", "share", "skew_sign"});
    std::size_t rank = 1;
    for (const auto& r : rows) {
        t.row(std::vector<std::string>{std::to_string(rank++), bus_label(r.bus), r.reactive ? "q" : "p",
                                       format_number(r.weight), format_number(r.variance),
                                       format_number(r.share), std::to_string(r.skew_sign)});
    }
    return t;
}

}  // namespace detail

inline int cmd_solve_pf(const Globals& g, const std::string& case_path) {
    const Network net = load_case(case_path);
    const auto pf = solve_power_flow(net);
    const auto& op = pf.point;
    CsvTable t({"bus", "kind", "v_pu", "theta_rad", "p_pu", "q_pu"});
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        t.row(std::vector<std::string>{detail::bus_label(i), freqflux::detail::bus_kind_name(net.buses[i].kind),
                                       format_number(op.v(k)), format_number(op.theta(k)),
                                       format_number(op.p(k)), format_number(op.q(k))});
    }
    write_csv(g.out_dir / "pf.csv", t);
    std::cout << "power flow converged in " << pf.iterations << " iterations, max mismatch "
              << pf.max_mismatch << " pu, total load " << total_load(net) << " pu\n";
    return ok;
}

inline AngleReference pick_reference(const Network& net, const std::string& ref) {
    if (ref == "machines") return AngleReference::machines;
    if (ref == "none") return AngleReference::none;
    if (net.machines.empty()) {
        std::cerr << "note: case has no machines, using the bare network reference\n";
        return AngleReference::none;
    }
    return AngleReference::machines;
}

inline CsvTable matrix_long_table(const Mat& h, const Mat& k, const char* h_name, const char* k_name) {
    CsvTable t({"row_bus", "col_bus", h_name, k_name});
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
            t.row(std::vector<std::string>{std::to_string(r + 1), std::to_string(c + 1), format_number(h(r, c)),
                                           format_number(k(r, c))});
        }
    }
    return t;
}

inline int cmd_sensitivities(const Globals& g, const std::string& case_path, bool simplified,
                             const std::string& reference) {
    const Network net = load_case(case_path);
    if (simplified) {
        const auto s = simplified_weights(net);
        if (!s.warning.empty()) std::cerr << "warning: " << s.warning << "\n";
        write_csv(g.out_dir / "sensitivities_simplified.csv",
                  matrix_long_table(s.H, s.K, "H_rad_per_pu", "K_rad_per_pu"));
        CsvTable meta({"quantity", "value"});
        meta.row(std::vector<std::string>{"cond_b", format_number(s.cond_b)});
        meta.row(std::vector<std::string>{"g_to_b_ratio", format_number(s.g_to_b_ratio)});
        meta.row(std::vector<std::string>{"lossless_shortcut", s.lossless_shortcut ? "1" : "0"});
        meta.row(std::vector<std::string>{"augmented", s.augmented ? "1" : "0"});
        write_csv(g.out_dir / "sensitivities_simplified_meta.csv", meta);
        std::cout << "simplified sensitivities written, cond(B) " << s.cond_b << "\n";
        return ok;
    }
    const auto pf = solve_power_flow(net);
    SensitivityOptions opt;
    opt.reference = pick_reference(net, reference);
    const auto s = build_sensitivities(net, pf.point, opt);
    write_csv(g.out_dir / "sensitivities.csv", matrix_long_table(s.H, s.K, "H_rad_per_pu", "K_rad_per_pu"));
    CsvTable meta({"quantity", "value"});
    meta.row(std::vector<std::string>{"cond_c", format_number(s.meta.cond_c)});
    meta.row(std::vector<std::string>{"cond_f", format_number(s.meta.cond_f)});
    meta.row(std::vector<std::string>{"residual_fh", format_number(s.meta.residual_fh)});
    meta.row(std::vector<std::string>{"residual_c_inv", format_number(s.meta.residual_c_inv)});
    meta.row(std::vector<std::string>{"reference", opt.reference == AngleReference::machines ? "machines" : "none"});
    write_csv(g.out_dir / "sensitivities_meta.csv", meta);
    std::cout << "sensitivities written, cond(C) " << s.meta.cond_c << ", cond(F) " << s.meta.cond_f << "\n";
    return ok;
}

inline int cmd_coi_weights(const Globals& g, const std::string& case_path) {
    const Network net = load_case(case_path);
    const auto div = build_divider(net);
    const auto w = coi_weights(div, net.machines);
    const Vec scl = short_circuit_levels(assemble_admittance(net), net.machines);
    CsvTable t({"bus", "c", "scl_pu"});
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        t.row(std::vector<std::string>{detail::bus_label(i), format_number(w.c(k)), format_number(scl(k))});
    }
    write_csv(g.out_dir / "coi_weights.csv", t);
    CsvTable s({"quantity", "value"});
    s.row(std::vector<std::string>{"alpha", format_number(w.alpha)});
    s.row(std::vector<std::string>{"sum_c_plus_alpha", format_number(w.c.sum() + w.alpha)});
    s.row(std::vector<std::string>{"pinv_rank", std::to_string(div.rank)});
    write_csv(g.out_dir / "coi_summary.csv", s);
    std::cout << "alpha " << w.alpha << ", c^T 1 + alpha = " << w.c.sum() + w.alpha << "\n";
    return ok;
}

/// The input is either a case or a scenario holding "case", "events" (event
/// strings), "dt" and "t_end". Command-line events are appended and explicit
/// --dt / --tend win over the scenario.
inline int cmd_simulate(const Globals& g, const std::string& input_path, const std::vector<std::string>& event_specs,
                        std::optional<double> dt, std::optional<double> t_end) {
    const std::filesystem::path input(input_path);
    const nlohmann::json j = read_json_file(input);
    Network net;
    std::vector<Event> events;
    SimulationOptions opt;
    if (j.contains("buses")) {
        net = network_from_json(j);
    } else {
        try {
            std::filesystem::path cp = j.at("case").get<std::string>();
            net = load_case(cp.is_absolute() ? cp : input.parent_path() / cp);
            for (const auto& e : j.value("events", nlohmann::json::array())) {
                events.push_back(parse_event(e.get<std::string>()));
            }
            opt.dt = j.value("dt", opt.dt);
            opt.t_end = j.value("t_end", opt.t_end);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::invalid_argument, std::string("malformed simulation scenario: ") + e.what());
        }
    }
    for (const auto& s : event_specs) events.push_back(parse_event(s));
    if (dt) opt.dt = *dt;
    if (t_end) opt.t_end = *t_end;
    const Trajectory tr = simulate(net, events, opt);

    const std::size_t n = net.size();
    const std::size_t m = net.machines.size();
    std::vector<std::string> header{"t_s"};
    const char* per_bus[] = {"v", "theta", "p", "q", "p_dot", "q_dot", "omega_bus"};
    const char* units[] = {"_pu", "_rad", "_pu", "_pu", "_pu_per_s", "_pu_per_s", "_pu"};
    for (int f = 0; f < 7; ++f) {
        for (std::size_t i = 0; i < n; ++i) header.push_back(std::string(per_bus[f]) + detail::bus_label(i) + units[f]);
    }
    for (std::size_t k = 0; k < m; ++k) header.push_back("omega_g" + std::to_string(k + 1) + "_pu");
    header.insert(header.end(), {"omega_coi_true_pu", "omega_coi_est_full_pu", "omega_coi_est_simplified_pu"});
    CsvTable t(header);
    std::vector<double> row;
    for (Eigen::Index s = 0; s < tr.samples(); ++s) {
        row.clear();
        row.push_back(tr.t(s));
        for (const Mat* mat : {&tr.v, &tr.theta, &tr.p, &tr.q, &tr.p_dot, &tr.q_dot, &tr.omega_bus}) {
            for (Eigen::Index i = 0; i < mat->cols(); ++i) row.push_back((*mat)(s, i));
        }
        for (Eigen::Index k = 0; k < tr.omega_g.cols(); ++k) row.push_back(tr.omega_g(s, k));
        row.push_back(tr.omega_coi_true(s));
        row.push_back(tr.omega_coi_est_full(s));
        row.push_back(tr.omega_coi_est_simplified(s));
        t.row(row);
    }
    write_csv(g.out_dir / "trajectory.csv", t);

    CsvTable est({"mode", "rms_full_pu", "max_full_pu", "rms_simplified_pu", "max_simplified_pu",
                  "max_divider_error_pu"});
    for (auto mode : {SensitivityMode::frozen, SensitivityMode::reevaluated}) {
        const auto rep = compare_estimators(tr, net, mode);
        est.row(std::vector<std::string>{mode == SensitivityMode::frozen ? "frozen" : "reevaluated",
                                         format_number(rep.rms_full), format_number(rep.max_full),
                                         format_number(rep.rms_simplified), format_number(rep.max_simplified),
                                         format_number(rep.max_divider_error)});
        std::cout << (mode == SensitivityMode::frozen ? "frozen" : "reevaluated") << ": RMS full "
                  << rep.rms_full << " pu, RMS simplified " << rep.rms_simplified << " pu\n";
    }
    write_csv(g.out_dir / "estimators.csv", est);
    return ok;
}

inline Scenario load_scenario_with_overrides(const Globals& g, const std::string& path) {
    Scenario sc = load_scenario(path);
    if (g.seed) sc.base_seed = *g.seed;
    return sc;
}

inline int cmd_montecarlo(const Globals& g, const std::string& scenario_path, const std::string& propagation) {
    const Scenario sc = load_scenario_with_overrides(g, scenario_path);
    const Network net = load_case(sc.case_path);
    if (sc.noise.empty()) throw Error(ErrorKind::invalid_argument, "scenario has no noise models");
    std::vector<PropagationMode> modes;
    if (propagation.empty()) {
        modes.push_back(sc.mode);
    } else if (propagation == "both") {
        modes = {PropagationMode::full, PropagationMode::simplified};
    } else {
        modes.push_back(freqflux::detail::parse_mode(propagation));
    }
    for (auto mode : modes) {
        const std::string suffix =
            modes.size() == 1 ? "" : (mode == PropagationMode::full ? "_full" : "_simplified");
        const PropagationMap map = make_propagation_map(net, mode);
        MonteCarloOptions mc;
        mc.n_paths = sc.n_paths;
        mc.base_seed = sc.base_seed;
        mc.threads = g.threads;
        const Ensemble ens = monte_carlo(sc.noise, map, sc.dt, sc.steps(), mc);

        CsvTable paths({"path", "mean_domega_pu", "var_domega_pu2", "skew_domega", "kurt_domega",
                        "skew_level", "kurt_level", "final_omega_coi_pu"});
        for (const auto& p : ens.paths) {
            paths.row(std::vector<std::string>{
                std::to_string(p.path), format_number(p.increments.mean), format_number(p.increments.variance()),
                format_number(p.increments.skewness()), format_number(p.increments.excess_kurtosis()),
                format_number(p.levels.skewness()), format_number(p.levels.excess_kurtosis()),
                format_number(p.final_omega_coi)});
        }
        write_csv(g.out_dir / ("paths" + suffix + ".csv"), paths);

        CsvTable pooled({"d_omega_pu"});
        for (double x : ens.pooled_increments) pooled.row(std::vector<double>{x});
        write_csv(g.out_dir / ("pooled_domega" + suffix + ".csv"), pooled);
        CsvTable levels({"omega_coi_centred_pu"});
        for (double x : ens.pooled_levels) levels.row(std::vector<double>{x});
        write_csv(g.out_dir / ("pooled_levels" + suffix + ".csv"), levels);

        CsvTable moments(detail::stats_header());
        const auto inc = normality_report(ens.pooled_increments);
        const auto lev = normality_report(ens.pooled_levels);
        moments.row(detail::stats_cells("d_omega", inc));
        moments.row(detail::stats_cells("omega_coi_centred", lev));
        write_csv(g.out_dir / ("moments" + suffix + ".csv"), moments);
        write_csv(g.out_dir / ("dominance" + suffix + ".csv"),
                  detail::dominance_table(dominance_analysis(map, sc.noise, sc.dt)));
        std::cout << (mode == PropagationMode::full ? "full" : "simplified") << ": " << ens.paths.size()
                  << " paths, d_omega skew " << inc.skewness << ", level skew " << lev.skewness
                  << ", JB p " << inc.jb_p << "\n";
    }
    return ok;
}

inline int cmd_clt_check(const Globals& g, const std::string& scenario_path) {
    const Scenario sc = load_scenario_with_overrides(g, scenario_path);
    const Network net = load_case(sc.case_path);
    if (!sc.subnet.is_null()) {
        AggregationSpec spec = aggregation_spec_from_json(sc.subnet);
        spec.mode = sc.mode;
        const auto res = aggregation_experiment(net, spec, sc.dt, sc.steps(), sc.n_paths, sc.base_seed, g.threads);
        auto header = detail::stats_header();
        header.insert(header.end(), {"lindeberg_ratio", "lindeberg_pass", "max_share"});
        CsvTable t(header);
        for (const auto& [label, c] : {std::pair{"uniform", &res.uniform}, std::pair{"dominant", &res.dominant}}) {
            auto cells = detail::stats_cells(label, c->report);
            cells.push_back(format_number(c->lindeberg.ratio));
            cells.push_back(c->lindeberg.pass ? "1" : "0");
            cells.push_back(format_number(c->max_share));
            t.row(cells);
            write_csv(g.out_dir / (std::string("qq_") + label + ".csv"), detail::qq_table(c->report));
            std::cout << label << ": Lindeberg ratio " << c->lindeberg.ratio
                      << (c->lindeberg.pass ? " (pass)" : " (fail)") << ", JB p " << c->report.jb_p
                      << ", excess kurtosis " << c->report.excess_kurtosis << "\n";
        }
        write_csv(g.out_dir / "aggregation.csv", t);
        return ok;
    }
    if (sc.noise.empty()) throw Error(ErrorKind::invalid_argument, "scenario has neither noise nor subnet");
    const PropagationMap map = make_propagation_map(net, sc.mode);
    write_csv(g.out_dir / "dominance.csv", detail::dominance_table(dominance_analysis(map, sc.noise, sc.dt)));
    CsvTable lt({"epsilon", "ratio", "threshold", "pass"});
    const auto sources = increment_sources(sc.noise, map, sc.dt, sc.steps(), sc.base_seed);
    if (sources.size() >= 2) {
        const auto lr = lindeberg_ratio(sources, 0.1);
        lt.row(std::vector<std::string>{format_number(lr.epsilon), format_number(lr.ratio),
                                        format_number(lr.threshold), lr.pass ? "1" : "0"});
        std::cout << "Lindeberg ratio " << lr.ratio << (lr.pass ? " (pass)" : " (fail)") << "\n";
    } else {
        std::cout << "Lindeberg ratio skipped: fewer than 2 sources\n";
    }
    write_csv(g.out_dir / "lindeberg.csv", lt);
    return ok;
}

inline int cmd_stats(const Globals& g, const std::string& sample_path, const std::string& column) {
    const auto sample = read_csv_column(sample_path, column);
    const auto r = normality_report(sample);
    CsvTable t(detail::stats_header());
    t.row(detail::stats_cells(column.empty() ? "column1" : column, r));
    write_csv(g.out_dir / "stats.csv", t);
    write_csv(g.out_dir / "qq.csv", detail::qq_table(r));
    write_csv(g.out_dir / "histogram.csv", detail::histogram_table(r));
    std::cout << "n " << r.n << ", skewness " << r.skewness << ", excess kurtosis " << r.excess_kurtosis
              << ", JB p " << r.jb_p << ", KS p " << r.ks_p << "\n";
    return ok;
}

inline int run(int argc, const char* const* argv) {
    CLI::App app{"freqflux: injection-to-frequency propagation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    app.add_option("--threads", g.threads, "Cap on Monte-Carlo worker threads (0 = all cores)");
    auto* seed_opt = app.add_option("--seed", seed, "Override the scenario base seed");
    app.add_option("-o,--out-dir", out_dir, "Output directory");

    std::string case_path, scenario_path, sample_path, column, reference = "auto", propagation;
    bool simplified = false;
    std::vector<std::string> events;
    std::optional<double> dt, t_end;

    auto* pf = app.add_subcommand("solve-pf", "Solve the power flow");
    pf->add_option("case", case_path, "Case JSON")->required();
    auto* sens = app.add_subcommand("sensitivities", "Injection-to-frequency sensitivities");
    sens->add_option("case", case_path, "Case JSON")->required();
    sens->add_flag("--simplified", simplified, "Lossless short-circuit approximation");
    sens->add_option("--reference", reference, "Angle reference: auto, machines or none")
        ->check(CLI::IsMember({"auto", "machines", "none"}));
    auto* coi = app.add_subcommand("coi-weights", "CoI weighting vector and short-circuit levels");
    coi->add_option("case", case_path, "Case JSON")->required();
    auto* sim = app.add_subcommand("simulate", "Time-domain simulation with estimator comparison");
    sim->add_option("input", case_path, "Case or simulation scenario JSON")->required();
    sim->add_option("--event", events, "ramp:bus=4,rate=0.1,t0=10,dur=10 or step:bus=4,size=0.1,t0=1");
    sim->add_option("--dt", dt, "Step in s (<= 0.01)");
    sim->add_option("--tend", t_end, "End time in s");
    auto* mc = app.add_subcommand("montecarlo", "Monte-Carlo ensemble of a noise scenario");
    mc->add_option("scenario", scenario_path, "Scenario JSON")->required();
    mc->add_option("--propagation", propagation, "full, simplified or both (default: scenario)")
        ->check(CLI::IsMember({"full", "simplified", "both"}));
    auto* clt = app.add_subcommand("clt-check", "Dominance table and Lindeberg report");
    clt->add_option("scenario", scenario_path, "Scenario JSON")->required();
    auto* st = app.add_subcommand("stats", "Normality report of one CSV column");
    st->add_option("sample", sample_path, "CSV file with a header row")->required();
    st->add_option("--column", column, "Column name (default: first)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }
    g.out_dir = out_dir;
    if (seed_opt->count() > 0) g.seed = seed;

    try {
        if (pf->parsed()) return cmd_solve_pf(g, case_path);
        if (sens->parsed()) return cmd_sensitivities(g, case_path, simplified, reference);
        if (coi->parsed()) return cmd_coi_weights(g, case_path);
        if (sim->parsed()) return cmd_simulate(g, case_path, events, dt, t_end);
        if (mc->parsed()) return cmd_montecarlo(g, scenario_path, propagation);
        if (clt->parsed()) return cmd_clt_check(g, scenario_path);
        if (st->parsed()) return cmd_stats(g, sample_path, column);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: IoFailure: " << e.what() << "\n";
        return io;
    }
    return usage;
}

}  // namespace freqflux::cli
