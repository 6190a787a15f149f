#pragma once

#include "lmesim/grid.hpp"

#include <memory>
#include <string>
#include <vector>

namespace lmesim::testing {

inline std::string data_dir() { return LMESIM_TEST_DATA; }

inline Network load_fixture(const std::string& name) { return read_case_file(data_dir() + "/" + name); }

inline HourCase base_hour(const std::string& name, int hour = 0) {
    auto net = std::make_shared<const Network>(load_fixture(name));
    return apply_scenario(net, unit_scenario(*net, hour));
}

struct UnitSpec {
    GenKind kind;
    double cost;
    double rate;
    double cap;
};

// Buses 0..n-1, all units at the given buses, loads at the given buses.
inline Network make_network(int buses, const std::vector<Line>& lines, const std::vector<std::pair<int, UnitSpec>>& units,
                            const std::vector<std::pair<int, double>>& loads) {
    Network net;
    for (int b = 0; b < buses; ++b) net.buses.push_back({b, "b" + std::to_string(b), b % 2 ? "odd" : "even"});
    net.lines = lines;
    for (std::size_t i = 0; i < lines.size(); ++i) net.lines[i].id = static_cast<int>(i);
    for (const auto& [bus, u] : units)
        net.generators.push_back({net.num_generators(), bus, 0.0, u.cap, u.cost, u.rate, u.kind, is_variable_renewable(u.kind)});
    for (const auto& [bus, d] : loads) net.loads.push_back({net.num_loads(), bus, d});
    net.validate();
    return net;
}

inline HourCase hour_of(const Network& net, int hour = 0) {
    auto p = std::make_shared<const Network>(net);
    return apply_scenario(p, unit_scenario(*p, hour));
}

inline HourCase single_bus(const std::vector<UnitSpec>& units, double demand) {
    std::vector<std::pair<int, UnitSpec>> placed;
    for (const auto& u : units) placed.push_back({0, u});
    return hour_of(make_network(1, {}, placed, {{0, demand}}));
}

}  // namespace lmesim::testing
