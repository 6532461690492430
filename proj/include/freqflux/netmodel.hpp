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
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "freqflux/errors.hpp"
#include "freqflux/linalg.hpp"

namespace freqflux {

enum class BusKind { slack, pv, pq };

/// Static bus description. Ids are 0-based here; case files are 1-based.
struct Bus {
    std::size_t id = 0;
    BusKind kind = BusKind::pq;
    double v_setpoint = 1.0;  ///< pu, used at slack and PV buses
    double p_gen = 0.0;       ///< pu scheduled generation, used at PV buses
    double p_load = 0.0;
    double q_load = 0.0;
    double shunt_g = 0.0;
    double shunt_b = 0.0;
};

struct Branch {
    std::size_t from_bus = 0;
    std::size_t to_bus = 0;
    double r = 0.0;
    double x = 0.0;
    double b_charging = 0.0;  ///< total line charging, split half per end
    double tap = 1.0;         ///< off-nominal ratio on the from side
};

/// Classical synchronous machine (or grid-forming unit with virtual inertia).
struct Machine {
    std::size_t bus = 0;
    double inertia = 0.0;     ///< M = 2H, seconds on system base
    double x_internal = 0.0;  ///< stator plus step-up reactance, pu
    double damping = 2.0;     ///< pu, only used by the time-domain simulator
};

struct Network {
    std::string name;
    double base_mva = 100.0;
    double f_nominal_hz = 50.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Machine> machines;

    std::size_t size() const { return buses.size(); }
    double omega_base() const { return 2.0 * std::numbers::pi * f_nominal_hz; }
};

struct AdmittanceSet {
    CMat y_bus;
    Mat g_bus;
    Mat b_bus;

    Eigen::Index size() const { return y_bus.rows(); }
};

namespace detail {

inline bool finite_all(std::initializer_list<double> values) {
    for (double v : values) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

/// Number of connected components of the branch graph.
inline std::size_t component_count(std::size_t n, std::span<const Branch> branches) {
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    std::size_t components = n;
    for (const auto& br : branches) {
        auto a = find(br.from_bus);
        auto b = find(br.to_bus);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components;
}

inline void check_branches(std::size_t n, std::span<const Branch> branches) {
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const auto& br = branches[k];
        const std::string where = "branch " + std::to_string(k + 1);
        if (br.from_bus >= n || br.to_bus >= n) {
            throw Error(ErrorKind::invalid_branch, where + " references a missing bus");
        }
        if (br.from_bus == br.to_bus) {
            throw Error(ErrorKind::invalid_branch, where + " connects a bus to itself");
        }
        if (!finite_all({br.r, br.x, br.b_charging, br.tap})) {
            throw Error(ErrorKind::invalid_branch, where + " has non-finite parameters");
        }
        if (br.x == 0.0) {
            throw Error(ErrorKind::invalid_branch, where + " has zero series reactance");
        }
        if (br.tap <= 0.0) {
            throw Error(ErrorKind::invalid_branch, where + " has a non-positive tap ratio");
        }
    }
}

}  // namespace detail

/// Standard pi-equivalent stamping of series impedances, line charging, taps
/// and bus shunts.
inline AdmittanceSet assemble_admittance(std::span<const Bus> buses,
                                         std::span<const Branch> branches) {
    const std::size_t n = buses.size();
    if (n == 0) throw Error(ErrorKind::invalid_network, "network has no buses");
    detail::check_branches(n, branches);
    if (detail::component_count(n, branches) != 1) {
        throw Error(ErrorKind::disconnected_network,
                    "branch graph has more than one connected component");
    }

    CMat y = CMat::Zero(n, n);
    for (const auto& br : branches) {
        const Complex ys = 1.0 / Complex(br.r, br.x);
        const Complex ysh(0.0, br.b_charging / 2.0);
        const double t = br.tap;
        const auto f = static_cast<Eigen::Index>(br.from_bus);
        const auto to = static_cast<Eigen::Index>(br.to_bus);
        y(f, f) += (ys + ysh) / (t * t);
        y(to, to) += ys + ysh;
        y(f, to) -= ys / t;
        y(to, f) -= ys / t;
    }
    for (const auto& bus : buses) {
        const auto i = static_cast<Eigen::Index>(bus.id);
        y(i, i) += Complex(bus.shunt_g, bus.shunt_b);
    }
    return AdmittanceSet{y, y.real(), y.imag()};
}

inline AdmittanceSet assemble_admittance(const Network& net) {
    return assemble_admittance(net.buses, net.branches);
}

/// Checks the type invariants of a network description: sequential ids,
/// finite per-unit data, exactly one slack bus and well-formed machines.
inline void validate_network(const Network& net) {
    const std::size_t n = net.size();
    if (n == 0) throw Error(ErrorKind::invalid_network, "network has no buses");
    std::size_t slack = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& b = net.buses[i];
        if (b.id != i) {
            throw Error(ErrorKind::invalid_network, "bus ids must be sequential");
        }
        if (!detail::finite_all(
                {b.v_setpoint, b.p_gen, b.p_load, b.q_load, b.shunt_g, b.shunt_b})) {
            throw Error(ErrorKind::invalid_network,
                        "bus " + std::to_string(i + 1) + " has non-finite data");
        }
        if (b.kind != BusKind::pq && !(b.v_setpoint > 0.0)) {
            throw Error(ErrorKind::invalid_network,
                        "bus " + std::to_string(i + 1) + " has a non-positive voltage setpoint");
        }
        if (b.kind == BusKind::slack) ++slack;
    }
    if (slack != 1) {
        throw Error(ErrorKind::invalid_network,
                    "expected exactly one slack bus, found " + std::to_string(slack));
    }
    detail::check_branches(n, net.branches);
    if (detail::component_count(n, net.branches) != 1) {
        throw Error(ErrorKind::disconnected_network,
                    "branch graph has more than one connected component");
    }
    if (!(net.f_nominal_hz > 0.0) || !(net.base_mva > 0.0)) {
        throw Error(ErrorKind::invalid_network, "base_mva and f_nominal_hz must be positive");
    }
    for (std::size_t k = 0; k < net.machines.size(); ++k) {
        const auto& m = net.machines[k];
        const std::string where = "machine " + std::to_string(k + 1);
        if (m.bus >= n) throw Error(ErrorKind::invalid_network, where + " references a missing bus");
        if (!(m.inertia > 0.0)) throw Error(ErrorKind::invalid_network, where + " needs M > 0");
        if (!(m.x_internal > 0.0)) {
            throw Error(ErrorKind::invalid_network, where + " needs x_internal > 0");
        }
        if (!std::isfinite(m.damping) || m.damping < 0.0) {
            throw Error(ErrorKind::invalid_network, where + " has invalid damping");
        }
    }
}

/// Diagonal of the machine admittance matrix: sum of 1/(j x_internal) per bus.
inline CVec machine_admittance(std::size_t n, std::span<const Machine> machines) {
    CVec yg = CVec::Zero(static_cast<Eigen::Index>(n));
    for (const auto& m : machines) {
        yg(static_cast<Eigen::Index>(m.bus)) += 1.0 / Complex(0.0, m.x_internal);
    }
    return yg;
}

/// Admittance of the network with machine internal reactances stamped as
/// shunts at their terminal buses (machine EMF nodes grounded).
inline AdmittanceSet augment_with_machines(const AdmittanceSet& adm,
                                           std::span<const Machine> machines) {
    CMat y = adm.y_bus;
    y.diagonal() += machine_admittance(static_cast<std::size_t>(adm.size()), machines);
    return AdmittanceSet{y, y.real(), y.imag()};
}

/// SCL_i = 1 / |Z_ii| with Z = [Y_bus + Y_g]^-1.
inline Vec short_circuit_levels(const AdmittanceSet& adm, std::span<const Machine> machines) {
    const auto aug = augment_with_machines(adm, machines);
    const ComplexLu lu(aug.y_bus, "Y_bus + Y_g");
    const CMat z = lu.inverse();
    Vec scl(z.rows());
    for (Eigen::Index i = 0; i < z.rows(); ++i) scl(i) = 1.0 / std::abs(z(i, i));
    return scl;
}

inline double total_load(const Network& net) {
    double total = 0.0;
    for (const auto& b : net.buses) total += b.p_load;
    return total;
}

}  // namespace freqflux
