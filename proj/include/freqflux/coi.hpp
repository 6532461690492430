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

// Center-of-inertia frequency and the frequency divider.
//
// Frequencies are in pu with 1.0 = nominal. The divider relates bus and
// machine speed deviations through
//   B_bg (omega_g - 1_m) = [B_bus + B_g] (omega - 1_n)
// where B_g = diag(Im 1/(j x)) = diag(-1/x) at machine buses and column k of
// the n x m matrix B_bg holds -1/x_k at the terminal bus of machine k.

#include <span>

#include "freqflux/errors.hpp"
#include "freqflux/linalg.hpp"
#include "freqflux/netmodel.hpp"
#include "freqflux/sensitivity.hpp"

namespace freqflux {

struct DividerMatrices {
    Mat B_bb;        ///< B_bus + B_g, n x n
    Mat B_bg;        ///< n x m
    Mat B_bg_pinv;   ///< m x n
    double svd_tolerance = 1e-10;  ///< relative singular-value cutoff
    Eigen::Index rank = 0;
};

struct CoIWeights {
    Vec c;
    double alpha = 0.0;
    Vec m_g;  ///< normalized inertias, sums to one
};

inline DividerMatrices build_divider(const AdmittanceSet& adm, std::span<const Machine> machines,
                                     double svd_tolerance = 1e-10) {
    if (machines.empty()) {
        throw Error(ErrorKind::invalid_argument, "frequency divider needs at least one machine");
    }
    const Eigen::Index n = adm.size();
    const auto m = static_cast<Eigen::Index>(machines.size());
    DividerMatrices div;
    div.svd_tolerance = svd_tolerance;
    div.B_bb = adm.b_bus;
    div.B_bg = Mat::Zero(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto& mach = machines[static_cast<std::size_t>(k)];
        if (!(mach.x_internal > 0.0) || mach.bus >= static_cast<std::size_t>(n)) {
            throw Error(ErrorKind::invalid_network, "machine " + std::to_string(k + 1) +
                                                        " has invalid reactance or bus");
        }
        const auto i = static_cast<Eigen::Index>(mach.bus);
        const double b = -1.0 / mach.x_internal;
        div.B_bb(i, i) += b;
        div.B_bg(i, k) = b;
    }
    auto pinv = pseudo_inverse(div.B_bg, svd_tolerance);
    div.B_bg_pinv = std::move(pinv.matrix);
    div.rank = pinv.rank;
    return div;
}

inline DividerMatrices build_divider(const Network& net, double svd_tolerance = 1e-10) {
    return build_divider(assemble_admittance(net), net.machines, svd_tolerance);
}

inline Vec normalized_inertia(std::span<const Machine> machines) {
    Vec m(static_cast<Eigen::Index>(machines.size()));
    for (std::size_t k = 0; k < machines.size(); ++k) {
        m(static_cast<Eigen::Index>(k)) = machines[k].inertia;
    }
    const double total = m.sum();
    if (!(total > 0.0)) throw Error(ErrorKind::invalid_network, "total inertia must be positive");
    return m / total;
}

/// c^T = m_g^T B_bg^+ [B_bus + B_g],  alpha = m_g^T (1_m - B_bg^+ [B_bus + B_g] 1_n).
inline CoIWeights coi_weights(const DividerMatrices& div, std::span<const Machine> machines) {
    if (static_cast<Eigen::Index>(machines.size()) != div.B_bg.cols()) {
        throw Error(ErrorKind::dimension_mismatch, "machine count differs from divider");
    }
    CoIWeights w;
    w.m_g = normalized_inertia(machines);
    const Mat chain = div.B_bg_pinv * div.B_bb;  // m x n
    w.c = chain.transpose() * w.m_g;
    const Vec ones_n = Vec::Ones(div.B_bb.rows());
    w.alpha = w.m_g.sum() - w.m_g.dot(chain * ones_n);
    return w;
}

inline double coi_from_machines(std::span<const Machine> machines, const Vec& omega_g) {
    if (static_cast<Eigen::Index>(machines.size()) != omega_g.size() || omega_g.size() == 0) {
        throw Error(ErrorKind::dimension_mismatch, "one speed per machine is required");
    }
    return normalized_inertia(machines).dot(omega_g);
}

/// omega_g = B_bg^+ [B_bus + B_g] (omega - 1_n) + 1_m.
inline Vec machine_speeds_from_bus(const DividerMatrices& div, const Vec& omega_bus) {
    if (omega_bus.size() != div.B_bb.rows()) {
        throw Error(ErrorKind::dimension_mismatch, "one frequency per bus is required");
    }
    const Vec dev = omega_bus - Vec::Ones(omega_bus.size());
    return div.B_bg_pinv * (div.B_bb * dev) + Vec::Ones(div.B_bg.cols());
}

/// c^T omega + alpha for absolute bus frequencies in pu.
inline double coi_from_bus(const CoIWeights& w, const Vec& omega_bus) {
    if (omega_bus.size() != w.c.size()) {
        throw Error(ErrorKind::dimension_mismatch, "one frequency per bus is required");
    }
    return w.c.dot(omega_bus) + w.alpha;
}

/// Estimated CoI frequency from injection rates. Bus frequencies from the
/// sensitivities are deviations from nominal, so
///   deviation = c^T [H p_dot + K q_dot] / omega_base
///   level     = c^T (1 + deviation vector) + alpha = 1 + deviation
///   literal   = deviation + alpha (alpha added to the deviation directly).
struct CoiEstimate {
    double deviation = 0.0;
    double level = 1.0;
    double literal = 0.0;
};

inline CoiEstimate coi_estimate(const SensitivitySet& sens, const CoIWeights& w, const Vec& p_dot,
                                const Vec& q_dot) {
    const auto state = bus_frequencies(sens, p_dot, q_dot);
    const double dev = w.c.dot(state.omega);
    return {dev, 1.0 + dev, dev + w.alpha};
}

/// Lossless estimate: deviation = -c^T B_bus^-1 p_dot / omega_base.
inline CoiEstimate coi_estimate_simplified(const SimplifiedSensitivity& simp, const CoIWeights& w,
                                           const Vec& p_dot) {
    if (p_dot.size() != w.c.size()) {
        throw Error(ErrorKind::dimension_mismatch, "one rate per bus is required");
    }
    const double dev = -w.c.dot(simp.B_inv * p_dot) / simp.omega_base;
    return {dev, 1.0 + dev, dev + w.alpha};
}

}  // namespace freqflux
