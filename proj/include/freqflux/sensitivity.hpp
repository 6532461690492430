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

// Complex-frequency sensitivities of bus injections.
//
// With u = log v, the injection rates obey
//   p_dot = A rho + B omega,   q_dot = C rho + D omega
//   A = diag(p) + P,  B = -diag(q) + Q,  C = diag(q) + Q,  D = diag(p) - P
// and eliminating rho gives omega = H p_dot + K q_dot with
//   E = A C^-1,  F = B - E D,  H = F^-1,  K = -H E.
//
// Injections are invariant under a common rotation of all bus angles, so on a
// bare network B 1 = D 1 = 0 and F is singular. The default build therefore
// grounds the network on the machine internal EMFs: machine reactances are
// stamped into the admittance, and p, q on the diagonals become the injections
// of everything that is not a machine (loads, converters, noise sources).
// Frequencies are then measured against the machine internal angles.

#include <span>
#include <string>

#include "freqflux/errors.hpp"
#include "freqflux/linalg.hpp"
#include "freqflux/netmodel.hpp"
#include "freqflux/powerflow.hpp"

namespace freqflux {

struct FlowMatrices {
    Mat P;
    Mat Q;
};

/// Element-wise branch flow terms
///   P_hk = v_h v_k [G_hk cos(theta_hk) + B_hk sin(theta_hk)]
///   Q_hk = v_h v_k [G_hk sin(theta_hk) - B_hk cos(theta_hk)]
/// whose row sums are the injections through `adm`.
inline FlowMatrices flow_matrices(const Vec& v, const Vec& theta, const AdmittanceSet& adm) {
    const Eigen::Index n = adm.size();
    if (v.size() != n || theta.size() != n) {
        throw Error(ErrorKind::dimension_mismatch, "state dimension differs from network size");
    }
    FlowMatrices out{Mat::Zero(n, n), Mat::Zero(n, n)};
    for (Eigen::Index h = 0; h < n; ++h) {
        for (Eigen::Index k = 0; k < n; ++k) {
            const double g = adm.g_bus(h, k);
            const double b = adm.b_bus(h, k);
            if (g == 0.0 && b == 0.0) continue;
            const double th = theta(h) - theta(k);
            const double c = std::cos(th);
            const double s = std::sin(th);
            const double vv = v(h) * v(k);
            out.P(h, k) = vv * (g * c + b * s);
            out.Q(h, k) = vv * (g * s - b * c);
        }
    }
    return out;
}

inline FlowMatrices flow_matrices(const OperatingPoint& op, const AdmittanceSet& adm) {
    return flow_matrices(op.v, op.theta, adm);
}

enum class AngleReference {
    machines,  ///< machine EMFs grounded through x_internal (default)
    none,      ///< bare network; F is singular, kept for diagnostics
};

struct SensitivityOptions {
    AngleReference reference = AngleReference::machines;
    double min_rcond = kSingularRcond;
};

struct SensitivityMetadata {
    double cond_c = 0.0;  ///< 1-norm condition estimate of C
    double cond_f = 0.0;  ///< 1-norm condition estimate of F
    double residual_fh = 0.0;     ///< ||F H - I||_inf
    double residual_c_inv = 0.0;  ///< ||C C^-1 - I||_inf
    AngleReference reference = AngleReference::machines;
};

struct SensitivitySet {
    Mat A, B, C, D, E, F, H, K;
    Mat C_inv;
    Vec v, theta;  ///< state the set was evaluated at
    Vec p, q;      ///< injections on the diagonals of A..D
    double omega_base = 1.0;  ///< rad/s per pu frequency
    SensitivityMetadata meta;

    Eigen::Index size() const { return H.rows(); }
};

/// Rates are in pu: rho and omega are divided by omega_base.
struct ComplexFrequencyState {
    Vec rho;
    Vec omega;
};

namespace detail {

inline double identity_residual(const Mat& product) {
    return inf_norm(Mat(product - Mat::Identity(product.rows(), product.cols())));
}

}  // namespace detail

/// Builds A..K from flow matrices and the injections p, q that sit on the
/// diagonals.
inline SensitivitySet build_sensitivities(const FlowMatrices& flow, const Vec& p, const Vec& q,
                                          double omega_base,
                                          const SensitivityOptions& opt = {}) {
    const Eigen::Index n = flow.P.rows();
    if (p.size() != n || q.size() != n || flow.Q.rows() != n) {
        throw Error(ErrorKind::dimension_mismatch, "injection vectors differ from flow size");
    }
    SensitivitySet s;
    s.p = p;
    s.q = q;
    s.omega_base = omega_base;
    s.meta.reference = opt.reference;
    s.A = Mat(p.asDiagonal()) + flow.P;
    s.B = Mat((-q).asDiagonal()) + flow.Q;
    s.C = Mat(q.asDiagonal()) + flow.Q;
    s.D = Mat(p.asDiagonal()) - flow.P;

    const RealLu c_lu(s.C, "C = diag(q) + Q", opt.min_rcond,
                      "C is singular at exact no-load; use the simplified (IEC 60909) path");
    s.meta.cond_c = c_lu.condition_estimate();
    s.C_inv = c_lu.inverse();
    s.E = s.A * s.C_inv;
    s.F = s.B - s.E * s.D;

    const RealLu f_lu(s.F, "F = B - A C^-1 D", opt.min_rcond,
                      opt.reference == AngleReference::none
                          ? "a bare network has no angle reference; ground it on the machines"
                          : std::string{});
    s.meta.cond_f = f_lu.condition_estimate();
    s.H = f_lu.inverse();
    s.K = -s.H * s.E;
    s.meta.residual_fh = detail::identity_residual(s.F * s.H);
    s.meta.residual_c_inv = detail::identity_residual(s.C * s.C_inv);
    return s;
}

/// Injections of everything other than machines. At a solved point each
/// machine bus hands its whole generation to its machines, so what remains is
/// the negative load; buses without machines keep their full injection.
inline std::pair<Vec, Vec> external_injections(const Network& net, const OperatingPoint& op) {
    Vec p = op.p;
    Vec q = op.q;
    std::vector<bool> has_machine(net.size(), false);
    for (const auto& m : net.machines) has_machine[m.bus] = true;
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (!has_machine[i]) continue;
        const auto k = static_cast<Eigen::Index>(i);
        p(k) = -net.buses[i].p_load;
        q(k) = -net.buses[i].q_load;
    }
    return {p, q};
}

/// Builds the set at an arbitrary state. With the machine reference, p and q
/// are the non-machine injections; with no reference, the total injections.
inline SensitivitySet build_sensitivities(const Network& net, const Vec& v, const Vec& theta,
                                          const Vec& p, const Vec& q,
                                          const SensitivityOptions& opt = {}) {
    AdmittanceSet adm = assemble_admittance(net);
    if (opt.reference == AngleReference::machines) {
        if (net.machines.empty()) {
            throw Error(ErrorKind::invalid_argument,
                        "machine angle reference requested but the case has no machines");
        }
        adm = augment_with_machines(adm, net.machines);
    }
    auto s = build_sensitivities(flow_matrices(v, theta, adm), p, q, net.omega_base(), opt);
    s.v = v;
    s.theta = theta;
    return s;
}

inline SensitivitySet build_sensitivities(const Network& net, const OperatingPoint& op,
                                          const SensitivityOptions& opt = {}) {
    if (opt.reference == AngleReference::machines) {
        const auto [p, q] = external_injections(net, op);
        return build_sensitivities(net, op.v, op.theta, p, q, opt);
    }
    return build_sensitivities(net, op.v, op.theta, op.p, op.q, opt);
}

/// omega = (H p_dot + K q_dot) / omega_base and
/// rho = C^-1 (q_dot - D omega_rad) / omega_base, with p_dot, q_dot in pu/s.
inline ComplexFrequencyState bus_frequencies(const SensitivitySet& s, const Vec& p_dot,
                                             const Vec& q_dot) {
    if (p_dot.size() != s.size() || q_dot.size() != s.size()) {
        throw Error(ErrorKind::dimension_mismatch, "rate vectors differ from sensitivity size");
    }
    const Vec omega_rad = s.H * p_dot + s.K * q_dot;
    const Vec rho_rad = s.C_inv * (q_dot - s.D * omega_rad);
    return {rho_rad / s.omega_base, omega_rad / s.omega_base};
}

/// Forward map p_dot = A rho + B omega, q_dot = C rho + D omega with pu rates.
inline std::pair<Vec, Vec> injection_rates(const SensitivitySet& s,
                                           const ComplexFrequencyState& state) {
    const Vec rho = state.rho * s.omega_base;
    const Vec omega = state.omega * s.omega_base;
    return {s.A * rho + s.B * omega, s.C * rho + s.D * omega};
}

// Simplified sensitivities under the IEC 60909 short-circuit assumptions:
// A ~ G_bus, B ~ -B_bus, C = B, D = -A. Substituting into the general
// definitions gives E = -G B^-1, F = -B - G B^-1 G, H = F^-1, K = H G B^-1,
// i.e. H = Im(Y^-1) and K = -Re(Y^-1).

struct SimplifiedOptions {
    /// ||G||/||B|| below this drops to H = -B^-1, K = 0.
    double lossless_ratio = 1e-9;
    double min_rcond = kSingularRcond;
};

struct SimplifiedSensitivity {
    Mat H;
    Mat K;
    Mat B_used;   ///< susceptance matrix actually inverted
    Mat B_inv;
    double g_to_b_ratio = 0.0;
    double cond_b = 0.0;
    bool lossless_shortcut = false;
    bool augmented = false;  ///< B_g was added because B_bus was near-singular
    std::string warning;
    double omega_base = 1.0;
};

inline SimplifiedSensitivity simplified_weights(const AdmittanceSet& adm,
                                                std::span<const Machine> machines,
                                                double omega_base,
                                                const SimplifiedOptions& opt = {}) {
    SimplifiedSensitivity out;
    out.omega_base = omega_base;
    out.B_used = adm.b_bus;
    const Mat& g = adm.g_bus;

    Eigen::PartialPivLU<Mat> probe(out.B_used);
    double rcond = out.B_used.rows() == 0 ? 1.0 : probe.rcond();
    if (!(rcond >= opt.min_rcond)) {
        if (machines.empty()) {
            throw SingularMatrixError("B_bus", rcond,
                                      "add machines so B_bus can be augmented with B_g");
        }
        out.B_used += machine_admittance(static_cast<std::size_t>(adm.size()), machines)
                          .imag()
                          .asDiagonal();
        out.augmented = true;
        out.warning = "B_bus near-singular (rcond " + std::to_string(rcond) +
                      "); augmented with machine susceptances B_g";
    }
    const RealLu b_lu(out.B_used, out.augmented ? "B_bus + B_g" : "B_bus", opt.min_rcond,
                      "add machines so B_bus can be augmented with B_g");
    out.cond_b = b_lu.condition_estimate();
    out.B_inv = b_lu.inverse();

    const double b_norm = inf_norm(out.B_used);
    out.g_to_b_ratio = b_norm > 0.0 ? inf_norm(g) / b_norm : 0.0;
    if (out.g_to_b_ratio < opt.lossless_ratio) {
        out.lossless_shortcut = true;
        out.H = -out.B_inv;
        out.K = Mat::Zero(g.rows(), g.cols());
        return out;
    }
    const Mat g_binv = g * out.B_inv;
    const RealLu f_lu(Mat(-out.B_used - g_binv * g), "-B - G B^-1 G", opt.min_rcond);
    out.H = f_lu.inverse();
    out.K = out.H * g_binv;
    return out;
}

inline SimplifiedSensitivity simplified_weights(const Network& net,
                                                const SimplifiedOptions& opt = {}) {
    return simplified_weights(assemble_admittance(net), net.machines, net.omega_base(), opt);
}

}  // namespace freqflux
