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

// JSON case files. Bus ids are 1-based on disk and 0-based in memory.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "freqflux/errors.hpp"
#include "freqflux/netmodel.hpp"

namespace freqflux {

namespace detail {

inline BusKind parse_bus_kind(const std::string& s) {
    if (s == "slack" || s == "SLACK" || s == "ref") return BusKind::slack;
    if (s == "PV" || s == "pv") return BusKind::pv;
    if (s == "PQ" || s == "pq") return BusKind::pq;
    throw Error(ErrorKind::invalid_network, "unknown bus kind '" + s + "'");
}

inline const char* bus_kind_name(BusKind k) {
    switch (k) {
        case BusKind::slack: return "slack";
        case BusKind::pv: return "PV";
        case BusKind::pq: return "PQ";
    }
    return "PQ";
}

inline std::size_t external_id(const nlohmann::json& j, const char* key) {
    const auto id = j.at(key).get<long long>();
    if (id < 1) throw Error(ErrorKind::invalid_network, std::string(key) + " must be >= 1");
    return static_cast<std::size_t>(id - 1);
}

}  // namespace detail

inline Network network_from_json(const nlohmann::json& j) {
    Network net;
    try {
        net.name = j.value("name", std::string{});
        net.base_mva = j.at("base_mva").get<double>();
        net.f_nominal_hz = j.at("f_nominal_hz").get<double>();
        for (const auto& jb : j.at("buses")) {
            Bus b;
            b.id = detail::external_id(jb, "id");
            b.kind = detail::parse_bus_kind(jb.at("kind").get<std::string>());
            b.v_setpoint = jb.value("v_setpoint", 1.0);
            b.p_gen = jb.value("p_gen", 0.0);
            b.p_load = jb.value("p_load", 0.0);
            b.q_load = jb.value("q_load", 0.0);
            b.shunt_g = jb.value("shunt_g", 0.0);
            b.shunt_b = jb.value("shunt_b", 0.0);
            net.buses.push_back(b);
        }
        for (const auto& jb : j.at("branches")) {
            Branch br;
            br.from_bus = detail::external_id(jb, "from_bus");
            br.to_bus = detail::external_id(jb, "to_bus");
            br.r = jb.value("r", 0.0);
            br.x = jb.at("x").get<double>();
            br.b_charging = jb.value("b_charging", 0.0);
            br.tap = jb.value("tap", 1.0);
            // Case files conventionally write 0 for "no transformer".
            if (br.tap == 0.0) br.tap = 1.0;
            net.branches.push_back(br);
        }
        if (j.contains("machines")) {
            for (const auto& jm : j.at("machines")) {
                Machine m;
                m.bus = detail::external_id(jm, "bus");
                m.inertia = jm.at("inertia").get<double>();
                m.x_internal = jm.at("x_internal").get<double>();
                m.damping = jm.value("damping", 2.0);
                net.machines.push_back(m);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::invalid_network, std::string("malformed case: ") + e.what());
    }
    validate_network(net);
    return net;
}

inline nlohmann::json network_to_json(const Network& net) {
    nlohmann::json j;
    j["name"] = net.name;
    j["base_mva"] = net.base_mva;
    j["f_nominal_hz"] = net.f_nominal_hz;
    j["buses"] = nlohmann::json::array();
    for (const auto& b : net.buses) {
        j["buses"].push_back({{"id", b.id + 1},
                              {"kind", detail::bus_kind_name(b.kind)},
                              {"v_setpoint", b.v_setpoint},
                              {"p_gen", b.p_gen},
                              {"p_load", b.p_load},
                              {"q_load", b.q_load},
                              {"shunt_g", b.shunt_g},
                              {"shunt_b", b.shunt_b}});
    }
    j["branches"] = nlohmann::json::array();
    for (const auto& br : net.branches) {
        j["branches"].push_back({{"from_bus", br.from_bus + 1},
                                 {"to_bus", br.to_bus + 1},
                                 {"r", br.r},
                                 {"x", br.x},
                                 {"b_charging", br.b_charging},
                                 {"tap", br.tap}});
    }
    j["machines"] = nlohmann::json::array();
    for (const auto& m : net.machines) {
        j["machines"].push_back({{"bus", m.bus + 1},
                                 {"inertia", m.inertia},
                                 {"x_internal", m.x_internal},
                                 {"damping", m.damping}});
    }
    return j;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::invalid_argument, "cannot open input file '" + path.string() + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::invalid_argument,
                    "'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline Network load_case(const std::filesystem::path& path) {
    return network_from_json(read_json_file(path));
}

}  // namespace freqflux
