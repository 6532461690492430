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

// Seeded synthetic networks: random meshed test grids and downstream
// distribution subnetworks hung off an existing bus.

#include <cstdint>
#include <string>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "freqflux/errors.hpp"
#include "freqflux/netmodel.hpp"
#include "freqflux/rng.hpp"

namespace freqflux {

struct RandomNetworkSpec {
    std::size_t n_bus = 20;
    std::size_t n_machines = 3;
    std::size_t extra_links = 10;  ///< links added on top of a random spanning tree
};

/// Random connected grid. Bus 0 is the slack; machines sit on the first
/// n_machines buses, which are PV buses sharing the load evenly.
inline Network random_network(const RandomNetworkSpec& spec, std::uint64_t seed) {
    if (spec.n_bus < 2 || spec.n_machines < 1 || spec.n_machines > spec.n_bus) {
        throw Error(ErrorKind::invalid_argument, "random network needs n_bus >= 2 and 1..n_bus machines");
    }
    Philox4x32 rng(seed, 0, 0xA11CE);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    Network net;
    net.name = "random-" + std::to_string(spec.n_bus) + "-" + std::to_string(seed);
    double total_load = 0.0;
    for (std::size_t i = 0; i < spec.n_bus; ++i) {
        Bus b;
        b.id = i;
        b.kind = i == 0 ? BusKind::slack : (i < spec.n_machines ? BusKind::pv : BusKind::pq);
        b.v_setpoint = i < spec.n_machines ? uniform(1.0, 1.05) : 1.0;
        b.p_load = uniform(0.02, 0.15);
        b.q_load = 0.3 * b.p_load;
        total_load += b.p_load;
        net.buses.push_back(b);
    }
    for (std::size_t i = 1; i < spec.n_machines; ++i) {
        net.buses[i].p_gen = total_load / static_cast<double>(spec.n_machines);
    }
    auto add_link = [&](std::size_t a, std::size_t b) {
        Branch br;
        br.from_bus = a;
        br.to_bus = b;
        br.x = uniform(0.02, 0.12);
        br.r = br.x * uniform(0.05, 0.3);
        br.b_charging = uniform(0.0, 0.04);
        net.branches.push_back(br);
    };
    for (std::size_t i = 1; i < spec.n_bus; ++i) {
        boost::random::uniform_int_distribution<std::size_t> parent(0, i - 1);
        add_link(parent(rng), i);
    }
    boost::random::uniform_int_distribution<std::size_t> any(0, spec.n_bus - 1);
    for (std::size_t k = 0; k < spec.extra_links; ++k) {
        const std::size_t a = any(rng);
        const std::size_t b = any(rng);
        if (a != b) add_link(a, b);
    }
    for (std::size_t k = 0; k < spec.n_machines; ++k) {
        Machine m;
        m.bus = k;
        m.inertia = uniform(4.0, 20.0);
        m.x_internal = uniform(0.1, 0.3);
        net.machines.push_back(m);
    }
    validate_network(net);
    return net;
}

struct SubnetSpec {
    std::size_t attach_bus = 3;  ///< 0-based bus of the host network
    std::size_t n_buses = 1000;
    std::size_t n_loads = 2000;
    std::size_t extra_links = 50;
    double x_min = 0.002;  ///< pu per segment
    double x_max = 0.01;
    double r_over_x = 0.5;
    double load_p_min = 0.00005;  ///< pu per load
    double load_p_max = 0.00015;
    double load_q_ratio = 0.2;
};

struct SubnetLoad {
    std::size_t bus = 0;
    double p = 0.0;
};

struct SubnetNetwork {
    Network net;
    std::size_t first_subnet_bus = 0;
    std::vector<SubnetLoad> loads;
};

/// Random feeder tree (plus a few meshing links) hung below attach_bus, with
/// n_loads small loads placed uniformly at random on its buses.
inline SubnetNetwork attach_subnetwork(const Network& host, const SubnetSpec& spec, std::uint64_t seed) {
    if (spec.attach_bus >= host.size()) {
        throw Error(ErrorKind::invalid_argument, "subnet attach bus does not exist");
    }
    if (spec.n_buses < 1 || spec.n_loads < 1 || !(spec.x_min > 0.0) || spec.x_max < spec.x_min ||
        !(spec.load_p_min > 0.0) || spec.load_p_max < spec.load_p_min) {
        throw Error(ErrorKind::invalid_argument, "invalid subnet specification");
    }
    Philox4x32 rng(seed, 0, 0x5B7E7);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    SubnetNetwork out;
    out.net = host;
    out.net.name = host.name + "+subnet";
    const std::size_t first = host.size();
    out.first_subnet_bus = first;
    for (std::size_t i = 0; i < spec.n_buses; ++i) {
        Bus b;
        b.id = first + i;
        b.kind = BusKind::pq;
        out.net.buses.push_back(b);
    }
    auto add_link = [&](std::size_t a, std::size_t b) {
        Branch br;
        br.from_bus = a;
        br.to_bus = b;
        br.x = uniform(spec.x_min, spec.x_max);
        br.r = spec.r_over_x * br.x;
        out.net.branches.push_back(br);
    };
    add_link(spec.attach_bus, first);
    for (std::size_t i = 1; i < spec.n_buses; ++i) {
        boost::random::uniform_int_distribution<std::size_t> parent(0, i - 1);
        add_link(first + parent(rng), first + i);
    }
    boost::random::uniform_int_distribution<std::size_t> any(0, spec.n_buses - 1);
    for (std::size_t k = 0; k < spec.extra_links; ++k) {
        const std::size_t a = any(rng);
        const std::size_t b = any(rng);
        if (a != b) add_link(first + a, first + b);
    }
    for (std::size_t k = 0; k < spec.n_loads; ++k) {
        SubnetLoad load;
        load.bus = first + any(rng);
        load.p = uniform(spec.load_p_min, spec.load_p_max);
        out.net.buses[load.bus].p_load += load.p;
        out.net.buses[load.bus].q_load += spec.load_q_ratio * load.p;
        out.loads.push_back(load);
    }
    validate_network(out.net);
    return out;
}

}  // namespace freqflux
