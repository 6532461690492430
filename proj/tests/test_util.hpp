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

#include <filesystem>
#include <string>

#include "freqflux/case_io.hpp"
#include "freqflux/netmodel.hpp"

namespace freqflux::test {

inline std::filesystem::path data_dir() { return FREQFLUX_DATA_DIR; }
inline std::filesystem::path scenario_dir() { return FREQFLUX_SCENARIO_DIR; }
inline std::filesystem::path test_data_dir() { return FREQFLUX_TEST_DATA_DIR; }

inline Network ieee14() { return load_case(data_dir() / "ieee14.json"); }

inline Bus make_bus(std::size_t id, BusKind kind, double p_load = 0.0, double q_load = 0.0) {
    Bus b;
    b.id = id;
    b.kind = kind;
    b.p_load = p_load;
    b.q_load = q_load;
    return b;
}

inline Branch make_branch(std::size_t from, std::size_t to, double r, double x, double b = 0.0) {
    Branch br;
    br.from_bus = from;
    br.to_bus = to;
    br.r = r;
    br.x = x;
    br.b_charging = b;
    return br;
}

/// Three-bus triangle, slack at bus 0, machines at buses 0 and 1.
inline Network three_bus(bool with_load = true) {
    Network net;
    net.name = "tri";
    net.f_nominal_hz = 50.0;
    net.buses = {make_bus(0, BusKind::slack), make_bus(1, BusKind::pv),
                 make_bus(2, BusKind::pq, with_load ? 0.6 : 0.0, with_load ? 0.2 : 0.0)};
    net.buses[1].p_gen = with_load ? 0.3 : 0.0;
    net.branches = {make_branch(0, 1, 0.01, 0.1), make_branch(1, 2, 0.02, 0.15), make_branch(0, 2, 0.015, 0.12)};
    Machine m0;
    m0.bus = 0;
    m0.inertia = 10.0;
    m0.x_internal = 0.2;
    Machine m1 = m0;
    m1.bus = 1;
    m1.inertia = 6.0;
    m1.x_internal = 0.3;
    net.machines = {m0, m1};
    return net;
}

/// Copy with every branch resistance scaled.
inline Network scale_resistance(Network net, double s) {
    for (auto& br : net.branches) br.r *= s;
    for (auto& b : net.buses) b.shunt_g *= s;
    return net;
}

}  // namespace freqflux::test
