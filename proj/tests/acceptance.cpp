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

// Acceptance runner. Prints one PASS/FAIL line per criterion with the measured
// quantities; exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "freqflux/coi.hpp"
#include "freqflux/diagnostics.hpp"
#include "freqflux/dynsim.hpp"
#include "freqflux/powerflow.hpp"
#include "freqflux/sensitivity.hpp"
#include "freqflux/stochastic.hpp"
#include "freqflux/synth.hpp"
#include "test_util.hpp"

namespace {

using namespace freqflux;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Network scaled_r(Network net, double s) {
    for (auto& br : net.branches) br.r *= s;
    for (auto& b : net.buses) b.shunt_g *= s;
    return net;
}

Outcome round_trip() {
    const auto t0 = Clock::now();
    const Network net = test::ieee14();
    const auto sens = build_sensitivities(net, solve_power_flow(net).point);
    std::mt19937_64 gen(2026);
    std::normal_distribution<double> nd(0.0, 0.01);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        ComplexFrequencyState x{Vec(14), Vec(14)};
        for (int i = 0; i < 14; ++i) {
            x.rho(i) = nd(gen);
            x.omega(i) = nd(gen);
        }
        const auto [p_dot, q_dot] = injection_rates(sens, x);
        const auto back = bus_frequencies(sens, p_dot, q_dot);
        worst = std::max({worst, inf_norm(Vec(back.rho - x.rho)), inf_norm(Vec(back.omega - x.omega))});
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-8 && secs < 1.0, "max error " + num(worst) + ", " + num(secs) + " s"};
}

Outcome lossless_limit() {
    const Network net = scaled_r(test::ieee14(), 1e-6);
    const auto s = simplified_weights(net);
    const double k = inf_norm(s.K);
    const double h = inf_norm(Mat(s.H + s.B_inv));
    // Full build at the solved point, reported only: loading keeps K away from zero.
    const auto full = build_sensitivities(net, solve_power_flow(net).point);
    return {k < 1e-4 && h < 1e-4, "simplified |K| " + num(k) + ", |H + B^-1| " + num(h) +
                                      " (full build at solved point: |K| " + num(inf_norm(full.K)) + ")"};
}

Outcome coi_fixed_point() {
    double worst = 0.0;
    const Network ieee = test::ieee14();
    const auto w14 = coi_weights(build_divider(ieee), ieee.machines);
    worst = std::abs(w14.c.sum() + w14.alpha - 1.0);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        RandomNetworkSpec spec;
        spec.n_bus = 8 + seed % 40;
        spec.n_machines = 1 + seed % 6;
        spec.extra_links = seed % 15;
        const Network net = random_network(spec, seed);
        const auto w = coi_weights(build_divider(net), net.machines);
        worst = std::max(worst, std::abs(w.c.sum() + w.alpha - 1.0));
    }
    return {worst < 1e-10, "max |c^T 1 + alpha - 1| " + num(worst) + " over 51 networks"};
}

Outcome total_load_check() {
    const Network net = test::ieee14();
    const auto pf = solve_power_flow(net);
    const double load = total_load(net);
    const double losses = pf.point.p.sum();
    return {std::abs(load - 2.59) < 0.02,
            "load " + num(load) + " pu, generation " + num(load + losses) + " pu, losses " + num(losses) + " pu"};
}

Outcome ramp_estimators() {
    const auto t0 = Clock::now();
    const Network net = test::ieee14();
    Event ev;
    ev.kind = EventKind::load_ramp;
    ev.bus = 3;
    ev.p_rate = 0.1;
    ev.t_start = 10.0;
    ev.duration = 10.0;
    const std::vector<Event> events{ev};
    SimulationOptions opt;
    opt.dt = 0.005;
    opt.t_end = 40.0;
    const auto tr = simulate(net, events, opt);
    const auto rep = compare_estimators(tr, net, SensitivityMode::frozen);
    const double secs = seconds_since(t0);

    const auto k0 = static_cast<Eigen::Index>(std::llround(ev.t_start / opt.dt));
    const auto k1 = static_cast<Eigen::Index>(std::llround((ev.t_start + ev.duration) / opt.dt));
    auto drop = [&](const Vec& x) { return x(k0) - x.segment(k0, k1 - k0 + 1).minCoeff(); };
    const double true_drop = drop(tr.omega_coi_true);
    // A dip is a fall below the pre-ramp value of at least 1 % of the true fall.
    const double full_drop = drop(rep.est_full);
    const double simp_drop = drop(rep.est_simplified);
    const bool better = rep.rms_full < rep.rms_simplified;
    const bool dips = full_drop > 0.01 * true_drop && simp_drop > 0.01 * true_drop;
    return {better && dips && secs < 30.0,
            "rms full " + num(rep.rms_full) + " vs simplified " + num(rep.rms_simplified) +
                (better ? " (ok)" : " (not smaller)") + "; fall during ramp: true " + num(true_drop) + ", full " +
                num(full_drop) + ", simplified " + num(simp_drop) + (dips ? " (both dip)" : " (no dip)") + "; " +
                num(secs) + " s"};
}

Outcome skew_inheritance() {
    const Scenario sc = load_scenario(test::scenario_dir() / "mirrored_weibull.json");
    const Network net = load_case(sc.case_path);
    const PropagationMap map = make_propagation_map(net, sc.mode);
    const auto rows = dominance_analysis(map, sc.noise, sc.dt);
    const double strong = std::abs(rows[0].weight);
    const double weak = std::abs(rows[1].weight);
    const int expected = rows[0].skew_sign;
    int matched = 0;
    double min_abs = 1e300;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        MonteCarloOptions mc;
        mc.n_paths = sc.n_paths;
        mc.base_seed = 1000 + seed;
        mc.threads = 1;
        mc.pool_samples = false;
        const double skew = monte_carlo(sc.noise, map, sc.dt, sc.steps(), mc).levels.skewness();
        const int sign = skew > 0.0 ? 1 : -1;
        if (sign == expected && std::abs(skew) > 0.1) ++matched;
        min_abs = std::min(min_abs, std::abs(skew));
    }
    const bool ratio_ok = strong > 1.5 * weak;
    return {ratio_ok && matched >= 95,
            "|w| strong/weak " + num(strong / weak) + ", expected sign " + std::to_string(expected) + ", " +
                std::to_string(matched) + "/100 seeds match with |skew| > 0.1 (min |skew| " + num(min_abs) + ")"};
}

Outcome gaussian_closure() {
    const Scenario sc = load_scenario(test::scenario_dir() / "gaussian_ou.json");
    const Network net = load_case(sc.case_path);
    const PropagationMap map = make_propagation_map(net, sc.mode);
    int pass = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        MonteCarloOptions mc;
        mc.n_paths = sc.n_paths;
        mc.base_seed = 5000 + seed;
        mc.threads = 1;
        const auto ens = monte_carlo(sc.noise, map, sc.dt, sc.steps(), mc);
        if (normality_report(ens.pooled_increments).jb_p > 0.01) ++pass;
    }
    const NoiseModel& m = sc.noise.front();
    Philox4x32 rng(sc.base_seed, 0, 0);
    const OuSeries ou = euler_maruyama_ou(m, sc.dt, 1000000, rng);
    const double var = moments_of(std::span<const double>(ou.level.data(), static_cast<std::size_t>(ou.level.size())))
                           .variance();
    const double target = m.sigma * m.sigma / (2.0 * m.lambda);
    const double rel = std::abs(var / target - 1.0);
    return {pass >= 95 && rel < 0.1, "JB non-rejection " + std::to_string(pass) + "/100; stationary variance " +
                                          num(var) + " vs " + num(target) + " (" + num(100 * rel) + " %)"};
}

Outcome clt_breakdown() {
    const auto t0 = Clock::now();
    const Scenario sc = load_scenario(test::scenario_dir() / "subnet_clt.json");
    const AggregationSpec spec = aggregation_spec_from_json(sc.subnet);
    const auto r = aggregation_experiment(load_case(sc.case_path), spec, sc.dt, sc.steps(), sc.n_paths,
                                          sc.base_seed, 0);
    const double secs = seconds_since(t0);
    const bool uniform_ok = r.uniform.lindeberg.pass && r.uniform.report.jb_p > 0.01;
    const bool dominant_ok = r.dominant.lindeberg.ratio > 0.1 && r.dominant.report.excess_kurtosis > 0.5;
    return {uniform_ok && dominant_ok && secs < 120.0,
            "uniform: Lindeberg " + num(r.uniform.lindeberg.ratio) + ", JB p " + num(r.uniform.report.jb_p) +
                (uniform_ok ? " (ok)" : " (fail)") + "; dominant: Lindeberg " +
                num(r.dominant.lindeberg.ratio) + ", excess kurtosis " +
                num(r.dominant.report.excess_kurtosis) + ", share " + num(r.dominant.max_share) +
                (dominant_ok ? " (ok)" : " (fail)") + "; n " + std::to_string(r.uniform.report.n) + ", " +
                num(secs) + " s"};
}

Outcome property_suites() {
    std::vector<std::string> failed;
    const Network net = test::ieee14();

    const auto div = build_divider(net);
    const Mat& a = div.B_bg;
    const Mat& ap = div.B_bg_pinv;
    const Mat aap = a * ap, apa = ap * a;
    const double pinv = std::max({inf_norm(Mat(a * ap * a - a)), inf_norm(Mat(ap * a * ap - ap)),
                                  inf_norm(Mat(aap - aap.transpose())), inf_norm(Mat(apa - apa.transpose()))});
    if (!(pinv < 1e-8)) failed.push_back("pinv");

    const auto op = solve_power_flow(net).point;
    const auto flow = flow_matrices(op, assemble_admittance(net));
    const double rows = std::max(inf_norm(Vec(flow.P.rowwise().sum() - op.p)),
                                 inf_norm(Vec(flow.Q.rowwise().sum() - op.q)));
    if (!(rows < 1e-10)) failed.push_back("row sums");

    const PropagationMap map = make_propagation_map(net, PropagationMode::full);
    std::mt19937_64 gen(9);
    std::normal_distribution<double> nd;
    Mat dp1(50, 14), dq1(50, 14), dp2(50, 14), dq2(50, 14);
    for (Mat* m : {&dp1, &dq1, &dp2, &dq2}) {
        for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = nd(gen);
    }
    const Vec lhs = propagate_increments(map, 2.5 * dp1 - 0.5 * dp2, 2.5 * dq1 - 0.5 * dq2);
    const Vec rhs = 2.5 * propagate_increments(map, dp1, dq1) - 0.5 * propagate_increments(map, dp2, dq2);
    const double lin = inf_norm(Vec(lhs - rhs)) / inf_norm(rhs);
    if (!(lin < 1e-12)) failed.push_back("linearity");

    Event ev;
    ev.kind = EventKind::load_ramp;
    ev.bus = 3;
    ev.p_rate = 0.1;
    ev.t_start = 10.0;
    ev.duration = 10.0;
    const std::vector<Event> events{ev};
    auto run = [&](double dt) {
        SimulationOptions opt;
        opt.dt = dt;
        opt.t_end = 16.0;
        return simulate(net, events, opt).omega_coi_true;
    };
    const Vec c1 = run(0.01), c2 = run(0.005), c3 = run(0.0025);
    double e1 = 0.0, e2 = 0.0;
    for (Eigen::Index k = 0; k < c1.size(); ++k) {
        e1 = std::max(e1, std::abs(c1(k) - c2(2 * k)));
        e2 = std::max(e2, std::abs(c2(2 * k) - c3(4 * k)));
    }
    const double order = e1 / e2;
    if (!(std::abs(order - 4.0) <= 1.2)) failed.push_back("dt order");

    const Scenario sc = load_scenario(test::scenario_dir() / "mirrored_weibull.json");
    const PropagationMap wmap = make_propagation_map(load_case(sc.case_path), sc.mode);
    auto ensemble = [&](unsigned threads) {
        MonteCarloOptions mc;
        mc.n_paths = sc.n_paths;
        mc.base_seed = sc.base_seed;
        mc.threads = threads;
        return monte_carlo(sc.noise, wmap, sc.dt, sc.steps(), mc);
    };
    const auto r1 = ensemble(1), r2 = ensemble(1), r4 = ensemble(4);
    const bool repro = r1.pooled_increments == r2.pooled_increments && r1.pooled_increments == r4.pooled_increments &&
                       r1.pooled_levels == r4.pooled_levels && r1.increments.m3 == r4.increments.m3;
    if (!repro) failed.push_back("reproducibility");

    std::string detail = "pinv " + num(pinv) + ", row sums " + num(rows) + ", linearity " + num(lin) +
                         ", dt ratio " + num(order) + ", reproducible " + (repro ? "yes" : "no");
    if (!failed.empty()) {
        detail += "; failed:";
        for (const auto& f : failed) detail += " " + f;
    }
    return {failed.empty(), detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"1 round trip", round_trip},
        {"2 lossless limit", lossless_limit},
        {"3 CoI fixed point", coi_fixed_point},
        {"4 total load", total_load_check},
        {"5 ramp estimators", ramp_estimators},
        {"6 skew inheritance", skew_inheritance},
        {"7 Gaussian closure", gaussian_closure},
        {"8 CLT breakdown", clt_breakdown},
        {"9 property suites", property_suites},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s  %-20s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
