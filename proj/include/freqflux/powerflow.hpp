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

#include <cmath>
#include <utility>
#include <vector>

#include "freqflux/errors.hpp"
#include "freqflux/linalg.hpp"
#include "freqflux/netmodel.hpp"

namespace freqflux {

/// Solved steady state. p and q are net injections (generation minus load).
struct OperatingPoint {
    Vec v;
    Vec theta;
    Vec p;
    Vec q;

    Eigen::Index size() const { return v.size(); }
    /// Log-magnitude coordinates, u = log v.
    Vec u() const { return v.array().log().matrix(); }
};

struct PowerFlowOptions {
    double tolerance = 1e-8;
    int max_iterations = 50;
};

struct PowerFlowResult {
    OperatingPoint point;
    int iterations = 0;
    double max_mismatch = 0.0;
};

inline CVec phasors(const Vec& v, const Vec& theta) {
    CVec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = std::polar(v(i), theta(i));
    return out;
}

/// p_h = sum_k P_hk, q_h = sum_k Q_hk with
///   P_hk = v_h v_k [G_hk cos(theta_hk) + B_hk sin(theta_hk)]
///   Q_hk = v_h v_k [G_hk sin(theta_hk) - B_hk cos(theta_hk)].
inline std::pair<Vec, Vec> injections_from_state(const AdmittanceSet& adm, const Vec& v,
                                                 const Vec& theta) {
    const Eigen::Index n = adm.size();
    if (v.size() != n || theta.size() != n) {
        throw Error(ErrorKind::dimension_mismatch, "state dimension differs from network size");
    }
    Vec p = Vec::Zero(n);
    Vec q = Vec::Zero(n);
    for (Eigen::Index h = 0; h < n; ++h) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double g = adm.g_bus(h, k);
            const double b = adm.b_bus(h, k);
            if (g == 0.0 && b == 0.0) continue;
            const double th = theta(h) - theta(k);
            const double c = std::cos(th);
            const double s = std::sin(th);
            const double vv = v(h) * v(k);
            p(h) += vv * (g * c + b * s);
            q(h) += vv * (g * s - b * c);
        }
    }
    return {p, q};
}

/// Scheduled injections: generation at PV buses minus loads.
inline std::pair<Vec, Vec> scheduled_injections(const Network& net) {
    const auto n = static_cast<Eigen::Index>(net.size());
    Vec p(n), q(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& b = net.buses[static_cast<std::size_t>(i)];
        p(i) = (b.kind == BusKind::pq ? 0.0 : b.p_gen) - b.p_load;
        q(i) = -b.q_load;
    }
    return {p, q};
}

/// Polar Newton-Raphson from a flat start (setpoints imposed at PV and slack
/// buses) with a full Jacobian refactorization per iteration.
inline PowerFlowResult solve_power_flow(const Network& net, const PowerFlowOptions& opt = {}) {
    validate_network(net);
    const AdmittanceSet adm = assemble_admittance(net);
    const auto n = static_cast<Eigen::Index>(net.size());
    const auto [p_spec, q_spec] = scheduled_injections(net);

    std::vector<Eigen::Index> pvpq;
    std::vector<Eigen::Index> pq;
    Vec v = Vec::Ones(n);
    Vec theta = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& b = net.buses[static_cast<std::size_t>(i)];
        if (b.kind != BusKind::pq) v(i) = b.v_setpoint;
        if (b.kind != BusKind::slack) pvpq.push_back(i);
        if (b.kind == BusKind::pq) pq.push_back(i);
    }

    const auto npvpq = static_cast<Eigen::Index>(pvpq.size());
    const auto npq = static_cast<Eigen::Index>(pq.size());
    const CMat& y = adm.y_bus;

    auto mismatch = [&](const CVec& vc, Vec& f) {
        const CVec s = vc.cwiseProduct((y * vc).conjugate());
        f.resize(npvpq + npq);
        for (Eigen::Index a = 0; a < npvpq; ++a) f(a) = s(pvpq[a]).real() - p_spec(pvpq[a]);
        for (Eigen::Index a = 0; a < npq; ++a) f(npvpq + a) = s(pq[a]).imag() - q_spec(pq[a]);
        return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
    };

    PowerFlowResult result;
    Vec f;
    CVec vc = phasors(v, theta);
    double worst = mismatch(vc, f);
    int iter = 0;
    while (worst > opt.tolerance) {
        if (iter >= opt.max_iterations) {
            throw Error(ErrorKind::no_convergence,
                        "power flow did not converge in " + std::to_string(opt.max_iterations) +
                            " iterations (max mismatch " + std::to_string(worst) + " pu)");
        }
        const CVec ibus = y * vc;
        const CVec vnorm = vc.cwiseQuotient(vc.cwiseAbs().cast<Complex>());
        // dS/dtheta and dS/d|V| in dense form.
        const CMat ds_dth = Complex(0.0, 1.0) * vc.asDiagonal() *
                            (CMat(ibus.asDiagonal()) - y * vc.asDiagonal()).conjugate();
        const CMat ds_dv = vc.asDiagonal() * (y * vnorm.asDiagonal()).conjugate() +
                           CMat(ibus.conjugate().cwiseProduct(vnorm).asDiagonal());

        Mat jac(npvpq + npq, npvpq + npq);
        for (Eigen::Index r = 0; r < npvpq; ++r) {
            for (Eigen::Index c = 0; c < npvpq; ++c) jac(r, c) = ds_dth(pvpq[r], pvpq[c]).real();
            for (Eigen::Index c = 0; c < npq; ++c) jac(r, npvpq + c) = ds_dv(pvpq[r], pq[c]).real();
        }
        for (Eigen::Index r = 0; r < npq; ++r) {
            for (Eigen::Index c = 0; c < npvpq; ++c) jac(npvpq + r, c) = ds_dth(pq[r], pvpq[c]).imag();
            for (Eigen::Index c = 0; c < npq; ++c) jac(npvpq + r, npvpq + c) = ds_dv(pq[r], pq[c]).imag();
        }
        const RealLu lu(jac, "power-flow Jacobian");
        const Vec dx = lu.solve(-f);
        for (Eigen::Index a = 0; a < npvpq; ++a) theta(pvpq[a]) += dx(a);
        for (Eigen::Index a = 0; a < npq; ++a) v(pq[a]) += dx(npvpq + a);
        if (!v.allFinite() || !theta.allFinite() || (v.array() <= 0.0).any()) {
            throw Error(ErrorKind::no_convergence, "power-flow iterate left the feasible region");
        }
        vc = phasors(v, theta);
        worst = mismatch(vc, f);
        ++iter;
    }

    const CVec s = vc.cwiseProduct((y * vc).conjugate());
    result.point = OperatingPoint{v, theta, s.real(), s.imag()};
    result.iterations = iter;
    result.max_mismatch = worst;
    return result;
}

}  // namespace freqflux
