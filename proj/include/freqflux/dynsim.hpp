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

// Classical-machine time-domain simulator used as ground truth for the CoI
// estimators.
//
// Each machine is a constant EMF behind x_internal obeying
//   d(delta)/dt = omega_base (omega_g - 1)
//   M d(omega_g)/dt = p_mech - p_e - D (omega_g - 1)
// Loads are constant admittances sized at the initial power flow; events add
// admittance on top. The network is solved algebraically at every stage of an
// explicit trapezoidal (Heun) step, which is second order in dt.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "freqflux/coi.hpp"
#include "freqflux/errors.hpp"
#include "freqflux/linalg.hpp"
#include "freqflux/netmodel.hpp"
#include "freqflux/powerflow.hpp"
#include "freqflux/sensitivity.hpp"

namespace freqflux {

enum class EventKind { load_ramp, load_step };

struct Event {
    EventKind kind = EventKind::load_ramp;
    std::size_t bus = 0;
    double p_rate = 0.0;   ///< pu/s at nominal voltage, ramps
    double p_step = 0.0;   ///< pu at nominal voltage, steps
    double q_ratio = 0.0;  ///< reactive consumption per unit of active
    double t_start = 0.0;
    double duration = 0.0;  ///< ramps only
};

/// Extra active consumption (pu at 1.0 pu voltage) that the event adds at t.
inline double event_power(const Event& ev, double t) {
    if (t < ev.t_start) return 0.0;
    if (ev.kind == EventKind::load_step) return ev.p_step;
    return ev.p_rate * std::min(t - ev.t_start, ev.duration);
}

inline void validate_event(const Event& ev, std::size_t n_bus) {
    if (ev.bus >= n_bus) throw Error(ErrorKind::invalid_argument, "event bus does not exist");
    if (!(ev.t_start >= 0.0)) throw Error(ErrorKind::invalid_argument, "event t_start must be >= 0");
    if (ev.kind == EventKind::load_ramp && !(ev.duration > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "ramp duration must be > 0");
    }
}

struct MachineDynState {
    double delta = 0.0;
    double omega_g = 1.0;
    double e_internal = 1.0;
    double p_mech = 0.0;
    double damping = 2.0;
};

struct SimulationOptions {
    double dt = 0.005;
    double t_end = 40.0;
    /// Optional initial speed perturbation per machine (pu).
    std::vector<double> initial_speed_offset;
};

/// Sample-major series: row k holds sample k. p and q are the injections of
/// everything that is not a machine, i.e. minus the load consumption.
struct Trajectory {
    double dt = 0.0;
    Vec t;
    Mat v, theta, p, q;
    Mat omega_g;
    Mat omega_bus;  ///< from central differences of unwrapped bus angles
    Mat p_dot, q_dot;
    Vec omega_coi_true;
    Vec omega_coi_est_full;        ///< frozen sensitivities
    Vec omega_coi_est_simplified;
    Vec accelerating_power;  ///< sum over machines of p_mech - p_e - D (omega_g - 1)
    std::vector<MachineDynState> initial_machines;

    Eigen::Index samples() const { return t.size(); }
};

enum class DiffScheme { central, backward };

/// Column-wise time derivative. Central differences inside, one-sided at the
/// ends; the backward scheme is causal except for the first sample.
inline Mat differentiate_series(const Mat& x, double dt, DiffScheme scheme = DiffScheme::central) {
    const Eigen::Index ns = x.rows();
    if (ns < 3) throw Error(ErrorKind::too_few_samples, "differentiation needs at least 3 samples");
    if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "dt must be positive");
    Mat d(ns, x.cols());
    d.row(0) = (x.row(1) - x.row(0)) / dt;
    for (Eigen::Index k = 1; k + 1 < ns; ++k) {
        if (scheme == DiffScheme::central) {
            d.row(k) = (x.row(k + 1) - x.row(k - 1)) / (2.0 * dt);
        } else {
            d.row(k) = (x.row(k) - x.row(k - 1)) / dt;
        }
    }
    d.row(ns - 1) = (x.row(ns - 1) - x.row(ns - 2)) / dt;
    return d;
}

inline std::pair<Mat, Mat> differentiate_injections(const Trajectory& traj,
                                                    DiffScheme scheme = DiffScheme::central) {
    return {differentiate_series(traj.p, traj.dt, scheme),
            differentiate_series(traj.q, traj.dt, scheme)};
}

namespace detail {

class NetworkSolver {
public:
    NetworkSolver(const Network& net, const OperatingPoint& op, std::span<const Event> events)
        : net_(net), events_(events.begin(), events.end()) {
        const auto n = static_cast<Eigen::Index>(net.size());
        y_base_ = assemble_admittance(net).y_bus;
        y_load_ = CVec::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& b = net.buses[static_cast<std::size_t>(i)];
            y_load_(i) = Complex(b.p_load, -b.q_load) / (op.v(i) * op.v(i));
        }
        y_g_.resize(static_cast<Eigen::Index>(net.machines.size()));
        for (std::size_t k = 0; k < net.machines.size(); ++k) {
            y_g_(static_cast<Eigen::Index>(k)) = 1.0 / Complex(0.0, net.machines[k].x_internal);
        }
        y_base_.diagonal() += machine_admittance(net.size(), net.machines);
    }

    CVec load_admittance(double t) const {
        CVec y = y_load_;
        for (const auto& ev : events_) {
            const double dp = event_power(ev, t);
            y(static_cast<Eigen::Index>(ev.bus)) += Complex(dp, -ev.q_ratio * dp);
        }
        return y;
    }

    /// Bus voltages for given machine EMF phasors at time t.
    CVec solve(double t, const CVec& emf) {
        const CVec yl = load_admittance(t);
        if (!factored_ || yl != cached_load_) {
            CMat y = y_base_;
            y.diagonal() += yl;
            lu_.compute(y);
            cached_load_ = yl;
            factored_ = true;
        }
        CVec inj = CVec::Zero(y_base_.rows());
        for (std::size_t k = 0; k < net_.machines.size(); ++k) {
            inj(static_cast<Eigen::Index>(net_.machines[k].bus)) +=
                y_g_(static_cast<Eigen::Index>(k)) * emf(static_cast<Eigen::Index>(k));
        }
        return lu_.solve(inj);
    }

    Complex machine_admittance_of(std::size_t k) const { return y_g_(static_cast<Eigen::Index>(k)); }

private:
    const Network& net_;
    std::vector<Event> events_;
    CMat y_base_;
    CVec y_load_;
    CVec y_g_;
    Eigen::PartialPivLU<CMat> lu_;
    CVec cached_load_;
    bool factored_ = false;
};

}  // namespace detail

/// Runs the simulation from the solved power flow of `net`. The estimate
/// series use sensitivities frozen at the initial equilibrium.
inline Trajectory simulate(const Network& net, std::span<const Event> events,
                           const SimulationOptions& opt = {}) {
    validate_network(net);
    if (net.machines.empty()) throw Error(ErrorKind::invalid_argument, "simulation needs machines");
    if (!(opt.dt > 0.0) || opt.dt > 0.01 + 1e-15) {
        throw Error(ErrorKind::invalid_argument, "dt must lie in (0, 10 ms]");
    }
    if (!(opt.t_end > opt.dt)) throw Error(ErrorKind::invalid_argument, "t_end must exceed dt");
    for (const auto& ev : events) validate_event(ev, net.size());

    const auto pf = solve_power_flow(net, {1e-12, 50});
    const OperatingPoint& op = pf.point;
    const auto n = static_cast<Eigen::Index>(net.size());
    const auto m = static_cast<Eigen::Index>(net.machines.size());
    const double wb = net.omega_base();

    // Split each bus's generation evenly among the machines connected to it.
    std::vector<int> per_bus(net.size(), 0);
    for (const auto& mach : net.machines) ++per_bus[mach.bus];
    const CVec vbus0 = phasors(op.v, op.theta);
    std::vector<MachineDynState> mstate(net.machines.size());
    CVec emf(m);
    for (std::size_t k = 0; k < net.machines.size(); ++k) {
        const auto& mach = net.machines[k];
        const auto i = static_cast<Eigen::Index>(mach.bus);
        const auto& b = net.buses[mach.bus];
        const Complex s_gen = Complex(op.p(i) + b.p_load, op.q(i) + b.q_load) /
                              static_cast<double>(per_bus[mach.bus]);
        const Complex current = std::conj(s_gen / vbus0(i));
        const Complex e = vbus0(i) + Complex(0.0, mach.x_internal) * current;
        mstate[k].delta = std::arg(e);
        mstate[k].e_internal = std::abs(e);
        mstate[k].damping = mach.damping;
        emf(static_cast<Eigen::Index>(k)) = e;
    }

    detail::NetworkSolver solver(net, op, events);

    auto electrical_power = [&](const CVec& e, const CVec& vb) {
        Vec pe(m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const auto i = static_cast<Eigen::Index>(net.machines[static_cast<std::size_t>(k)].bus);
            const Complex cur = solver.machine_admittance_of(static_cast<std::size_t>(k)) * (e(k) - vb(i));
            pe(k) = (e(k) * std::conj(cur)).real();
        }
        return pe;
    };

    // Mechanical power balances the electrical output of the discrete network
    // at t = 0 so the equilibrium is exact to rounding.
    {
        const CVec vb = solver.solve(0.0, emf);
        const Vec pe = electrical_power(emf, vb);
        for (Eigen::Index k = 0; k < m; ++k) mstate[static_cast<std::size_t>(k)].p_mech = pe(k);
    }

    Vec delta(m), omega(m), p_mech(m), damp(m), inertia(m), emag(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto& s = mstate[static_cast<std::size_t>(k)];
        delta(k) = s.delta;
        omega(k) = 1.0;
        if (static_cast<std::size_t>(k) < opt.initial_speed_offset.size()) {
            omega(k) += opt.initial_speed_offset[static_cast<std::size_t>(k)];
        }
        p_mech(k) = s.p_mech;
        damp(k) = s.damping;
        inertia(k) = net.machines[static_cast<std::size_t>(k)].inertia;
        emag(k) = s.e_internal;
    }

    auto emf_of = [&](const Vec& d) {
        CVec e(m);
        for (Eigen::Index k = 0; k < m; ++k) e(k) = std::polar(emag(k), d(k));
        return e;
    };

    struct Deriv {
        Vec d_delta, d_omega;
        CVec vbus;
        double accel = 0.0;
    };
    auto rhs = [&](double t, const Vec& d, const Vec& w) {
        Deriv out;
        const CVec e = emf_of(d);
        out.vbus = solver.solve(t, e);
        const Vec pe = electrical_power(e, out.vbus);
        const Vec acc = p_mech - pe - damp.cwiseProduct(w - Vec::Ones(m));
        out.d_delta = wb * (w - Vec::Ones(m));
        out.d_omega = acc.cwiseQuotient(inertia);
        out.accel = acc.sum();
        return out;
    };

    const auto steps = static_cast<Eigen::Index>(std::llround(opt.t_end / opt.dt));
    const Eigen::Index ns = steps + 1;
    Trajectory traj;
    traj.dt = opt.dt;
    traj.t.resize(ns);
    traj.v.resize(ns, n);
    traj.theta.resize(ns, n);
    traj.p.resize(ns, n);
    traj.q.resize(ns, n);
    traj.omega_g.resize(ns, m);
    traj.omega_coi_true.resize(ns);
    traj.accelerating_power.resize(ns);
    traj.initial_machines = mstate;

    const Vec m_g = normalized_inertia(net.machines);
    Vec prev_theta = op.theta;

    auto record = [&](Eigen::Index k, double t, const Deriv& d, const Vec& w) {
        traj.t(k) = t;
        const CVec yl = solver.load_admittance(t);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Complex vi = d.vbus(i);
            const double mag = std::abs(vi);
            double ang = std::arg(vi);
            // Unwrap against the previous sample.
            ang = prev_theta(i) + std::remainder(ang - prev_theta(i), 2.0 * std::numbers::pi);
            prev_theta(i) = ang;
            traj.v(k, i) = mag;
            traj.theta(k, i) = ang;
            const Complex consumed = mag * mag * std::conj(yl(i));
            traj.p(k, i) = -consumed.real();
            traj.q(k, i) = -consumed.imag();
        }
        traj.omega_g.row(k) = w.transpose();
        traj.omega_coi_true(k) = m_g.dot(w);
        traj.accelerating_power(k) = d.accel;
    };

    double t = 0.0;
    Deriv d0 = rhs(t, delta, omega);
    record(0, t, d0, omega);
    for (Eigen::Index k = 1; k < ns; ++k) {
        const Vec d1 = delta + opt.dt * d0.d_delta;
        const Vec w1 = omega + opt.dt * d0.d_omega;
        const double t1 = static_cast<double>(k) * opt.dt;
        const Deriv k2 = rhs(t1, d1, w1);
        delta += 0.5 * opt.dt * (d0.d_delta + k2.d_delta);
        omega += 0.5 * opt.dt * (d0.d_omega + k2.d_omega);
        if (!delta.allFinite() || !omega.allFinite()) {
            throw Error(ErrorKind::step_rejected, "non-finite state at t = " + std::to_string(t1));
        }
        t = t1;
        d0 = rhs(t, delta, omega);
        if (!d0.vbus.allFinite()) {
            throw Error(ErrorKind::no_convergence, "network solution failed at t = " + std::to_string(t));
        }
        record(k, t, d0, omega);
    }

    traj.omega_bus = differentiate_series(traj.theta, traj.dt).array() / wb + 1.0;
    std::tie(traj.p_dot, traj.q_dot) = differentiate_injections(traj);

    const auto sens = build_sensitivities(net, op);
    const auto simp = simplified_weights(net);
    const auto weights = coi_weights(build_divider(net), net.machines);
    traj.omega_coi_est_full.resize(ns);
    traj.omega_coi_est_simplified.resize(ns);
    for (Eigen::Index k = 0; k < ns; ++k) {
        const Vec pd = traj.p_dot.row(k).transpose();
        const Vec qd = traj.q_dot.row(k).transpose();
        traj.omega_coi_est_full(k) = coi_estimate(sens, weights, pd, qd).level;
        traj.omega_coi_est_simplified(k) = coi_estimate_simplified(simp, weights, pd).level;
    }
    return traj;
}

enum class SensitivityMode { frozen, reevaluated };

struct EstimatorReport {
    SensitivityMode mode = SensitivityMode::frozen;
    Vec est_full;
    Vec est_simplified;
    double rms_full = 0.0;
    double max_full = 0.0;
    double rms_simplified = 0.0;
    double max_simplified = 0.0;
    double max_divider_error = 0.0;  ///< |coi_from_machines - (c^T omega_bus + alpha)|
};

/// Errors of the full and simplified CoI estimates against the machine-speed
/// CoI. The reevaluated mode rebuilds the sensitivities at every sample.
inline EstimatorReport compare_estimators(const Trajectory& traj, const Network& net,
                                          SensitivityMode mode) {
    EstimatorReport rep;
    rep.mode = mode;
    const Eigen::Index ns = traj.samples();
    if (ns == 0) return rep;
    const auto weights = coi_weights(build_divider(net), net.machines);
    const auto simp = simplified_weights(net);
    rep.est_simplified = traj.omega_coi_est_simplified;
    if (mode == SensitivityMode::frozen) {
        rep.est_full = traj.omega_coi_est_full;
    } else {
        rep.est_full.resize(ns);
        for (Eigen::Index k = 0; k < ns; ++k) {
            const Vec v = traj.v.row(k).transpose();
            const Vec th = traj.theta.row(k).transpose();
            const Vec p = traj.p.row(k).transpose();
            const Vec q = traj.q.row(k).transpose();
            const auto sens = build_sensitivities(net, v, th, p, q);
            rep.est_full(k) = coi_estimate(sens, weights, traj.p_dot.row(k).transpose(),
                                           traj.q_dot.row(k).transpose())
                                  .level;
        }
    }
    const Vec err_full = rep.est_full - traj.omega_coi_true;
    const Vec err_simp = rep.est_simplified - traj.omega_coi_true;
    const auto count = static_cast<double>(ns);
    rep.rms_full = std::sqrt(err_full.squaredNorm() / count);
    rep.rms_simplified = std::sqrt(err_simp.squaredNorm() / count);
    rep.max_full = err_full.cwiseAbs().maxCoeff();
    rep.max_simplified = err_simp.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < ns; ++k) {
        const double fdf = coi_from_bus(weights, traj.omega_bus.row(k).transpose());
        rep.max_divider_error = std::max(rep.max_divider_error, std::abs(fdf - traj.omega_coi_true(k)));
    }
    return rep;
}

}  // namespace freqflux
