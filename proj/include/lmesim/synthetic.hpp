#pragma once

#include "lmesim/grid.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace lmesim {

// Region tags used by the generator.
inline constexpr const char* synthetic_regions[] = {"hydro", "coal", "solar"};

struct SyntheticParams {
    int buses = 30;
    int lines = 40;       // at least buses - 1
    int generators = 15;  // at least 3
    int loads = -1;       // -1: one load per bus
    int hours = 24;
    // Share of the generator count per kind.  Hydro and wind sit in the hydro
    // region, coal and nuclear in the coal region, solar in the solar region,
    // gas is spread round-robin.
    std::map<GenKind, double> mix = {
        {GenKind::hydro, 0.2}, {GenKind::coal, 0.2}, {GenKind::solar, 0.2}, {GenKind::gas, 0.4}};
    std::uint64_t seed = 7;
};

struct SyntheticCase {
    Network network;
    std::vector<HourScenario> scenarios;
};

// Three planted regions joined by a few limited tie lines.  Loads follow a
// seasonal and diurnal shape; solar follows a daylight curve peaking between
// hours 12 and 13.  Throws ConfigError on impossible parameters.
SyntheticCase generate_synthetic(const SyntheticParams& params);

}  // namespace lmesim
