#include "lmesim/synthetic.hpp"

#include "lmesim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace lmesim {

namespace {

constexpr int hydro_region = 0, coal_region = 1, solar_region = 2;
constexpr double pi = std::numbers::pi;

int region_for(GenKind k, int& gas_turn) {
    switch (k) {
        case GenKind::hydro:
        case GenKind::wind: return hydro_region;
        case GenKind::coal:
        case GenKind::nuclear: return coal_region;
        case GenKind::solar: return solar_region;
        case GenKind::gas: break;
    }
    static constexpr int order[] = {solar_region, coal_region, hydro_region};
    return order[gas_turn++ % 3];
}

// Largest-remainder apportionment of `total` units over the mix shares.
std::map<GenKind, int> apportion(const std::map<GenKind, double>& mix, int total) {
    double sum = 0.0;
    for (auto [k, f] : mix) {
        if (!(f >= 0.0) || !std::isfinite(f)) throw ConfigError("generator mix fractions must be non-negative");
        sum += f;
    }
    if (sum <= 0.0) throw ConfigError("generator mix is empty");
    std::map<GenKind, int> counts;
    std::vector<std::pair<double, GenKind>> rest;
    int used = 0;
    for (auto [k, f] : mix) {
        const double exact = total * f / sum;
        counts[k] = static_cast<int>(std::floor(exact));
        used += counts[k];
        rest.push_back({exact - counts[k], k});
    }
    std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; used < total; ++i, ++used) ++counts[rest[i % rest.size()].second];
    return counts;
}

}  // namespace

SyntheticCase generate_synthetic(const SyntheticParams& p) {
    if (p.buses < 3) throw ConfigError("synthetic case needs at least 3 buses");
    if (p.generators < 3) throw ConfigError("synthetic case needs at least 3 generators");
    if (p.lines < p.buses - 1) throw ConfigError("synthetic case needs at least buses-1 lines");
    if (p.hours < 0) throw ConfigError("hours must be non-negative");
    const int nb = p.buses;
    const int nd = p.loads < 0 ? nb : p.loads;
    if (nd < 1) throw ConfigError("synthetic case needs at least one load");

    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

    SyntheticCase out;
    Network& net = out.network;

    std::vector<int> region_start(4, 0);
    for (int r = 0; r < 3; ++r) region_start[r + 1] = region_start[r] + nb / 3 + (r < nb % 3 ? 1 : 0);
    std::vector<int> region_of(nb);
    for (int r = 0; r < 3; ++r)
        for (int b = region_start[r]; b < region_start[r + 1]; ++b) {
            region_of[b] = r;
            net.buses.push_back({b, std::string(synthetic_regions[r]) + "_" + std::to_string(b - region_start[r]),
                                 synthetic_regions[r]});
        }
    auto bus_in = [&](int r) { return region_start[r] + pick(region_start[r + 1] - region_start[r]); };

    std::vector<double> peak(3, 0.0);
    for (int d = 0; d < nd; ++d) {
        const int bus = d < nb ? (nd >= nb ? d : static_cast<int>(static_cast<long>(d) * nb / nd)) : pick(nb);
        const double base = uniform(20.0, 100.0);
        net.loads.push_back({d, bus, base});
        peak[region_of[bus]] += 1.25 * base;
    }
    for (double& pk : peak) pk = std::max(pk, 10.0);

    std::set<std::pair<int, int>> used;
    std::vector<double> tie_capacity(3, 0.0);
    auto add_line = [&](int a, int b, double limit) {
        used.insert({std::min(a, b), std::max(a, b)});
        net.lines.push_back({net.num_lines(), a, b, uniform(50.0, 300.0), limit});
        if (region_of[a] != region_of[b]) {
            tie_capacity[region_of[a]] += limit;
            tie_capacity[region_of[b]] += limit;
        }
    };
    auto tie_limit = [&](int ra, int rb) { return uniform(0.15, 0.3) * std::min(peak[ra], peak[rb]); };

    for (int r = 0; r < 3; ++r)
        for (int b = region_start[r] + 1; b < region_start[r + 1]; ++b)
            add_line(region_start[r] + pick(b - region_start[r]), b, uniform(1.0, 2.0) * peak[r]);
    const std::pair<int, int> ring[] = {{hydro_region, coal_region}, {coal_region, solar_region}, {solar_region, hydro_region}};
    for (int t = 0; t < 3 && net.num_lines() < p.lines; ++t) {
        auto [ra, rb] = ring[t];
        add_line(bus_in(ra), bus_in(rb), tie_limit(ra, rb));
    }
    for (int attempt = 0; net.num_lines() < p.lines; ++attempt) {
        int a, b;
        if (u(rng) < 0.3) {
            auto [ra, rb] = ring[pick(3)];
            a = bus_in(ra);
            b = bus_in(rb);
        } else {
            const int r = pick(3);
            a = bus_in(r);
            b = bus_in(r);
        }
        if (a == b || (used.count({std::min(a, b), std::max(a, b)}) && attempt < 100 * p.lines)) continue;
        const bool tie = region_of[a] != region_of[b];
        add_line(a, b, tie ? tie_limit(region_of[a], region_of[b]) : uniform(0.3, 1.0) * peak[region_of[a]]);
    }

    // Generators: place by kind, then size so that every region's anchor
    // technology keeps headroom beyond local load plus tie-line exchange.
    struct Unit {
        GenKind kind;
        int region;
        double weight;
    };
    std::vector<Unit> units;
    int gas_turn = 0;
    for (auto [kind, count] : apportion(p.mix, p.generators))
        for (int k = 0; k < count; ++k) units.push_back({kind, region_for(kind, gas_turn), uniform(0.5, 1.5)});

    auto kind_total = [&](GenKind k, int r) {
        const double pr = peak[r], tr = tie_capacity[r];
        switch (k) {
            case GenKind::hydro: return 1.5 * pr + tr;
            case GenKind::coal: return 1.0 * pr + tr;
            case GenKind::nuclear: return 0.2 * pr;
            case GenKind::wind: return 0.5 * pr;
            case GenKind::solar: return 2.5 * pr + tr;
            case GenKind::gas: return 0.0;
        }
        return 0.0;
    };
    std::map<std::pair<GenKind, int>, double> weight_sum;
    for (const auto& un : units) weight_sum[{un.kind, un.region}] += un.weight;
    std::vector<double> firm(3, 0.0);
    for (const auto& [key, w] : weight_sum)
        if (key.first != GenKind::gas && !is_variable_renewable(key.first)) firm[key.second] += kind_total(key.first, key.second);
    const double gas_share[] = {0.3, 0.4, 1.4};

    double total_firm = 0.0, total_peak = 0.0;
    for (const auto& un : units) {
        const auto key = std::make_pair(un.kind, un.region);
        double region_total = kind_total(un.kind, un.region);
        if (un.kind == GenKind::gas)
            region_total = std::max(gas_share[un.region] * peak[un.region], 1.3 * peak[un.region] - firm[un.region]);
        const double cap = region_total * un.weight / weight_sum[key];
        double cost = 0.0, rate = 0.0, pmin = 0.0;
        switch (un.kind) {
            case GenKind::hydro: cost = uniform(2.0, 6.0); break;
            case GenKind::nuclear: cost = uniform(7.0, 9.0); pmin = 0.5 * cap; break;
            case GenKind::wind: cost = uniform(0.2, 1.0); break;
            case GenKind::solar: cost = uniform(0.05, 0.5); break;
            case GenKind::coal: cost = uniform(18.0, 26.0); rate = 800.0; pmin = 0.1 * cap; break;
            case GenKind::gas: cost = uniform(32.0, 48.0); rate = 450.0; break;
        }
        if (!is_variable_renewable(un.kind)) total_firm += cap;
        net.generators.push_back({net.num_generators(), bus_in(un.region), pmin, cap, cost, rate, un.kind,
                                  is_variable_renewable(un.kind)});
    }
    for (double pk : peak) total_peak += pk;
    if (total_firm < 1.2 * total_peak) throw ConfigError("generator mix leaves too little dispatchable capacity");
    net.validate();

    // Hourly factors.
    std::mt19937_64 srng(p.seed ^ 0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> su(0.0, 1.0);
    std::vector<double> wind_state(net.num_generators(), 0.0);
    double cloud = 1.0;
    out.scenarios.reserve(p.hours);
    for (int h = 0; h < p.hours; ++h) {
        const int day = (h / 24) % 365, hod = h % 24;
        if (hod == 0) cloud = 0.6 + 0.4 * su(srng);
        const double season = 1.0 + 0.12 * std::cos(2.0 * pi * (day - 200) / 365.0);
        const double daily = 0.8 + 0.1 * std::sin(2.0 * pi * (hod - 8) / 24.0) +
                             0.12 * std::exp(-(hod - 18.5) * (hod - 18.5) / 8.0);
        HourScenario s;
        s.hour_index = h;
        for (const auto& d : net.loads) s.load_scale[d.id] = std::max(0.0, season * daily * (1.0 + 0.03 * gauss(srng)));
        const double light = std::max(0.0, std::sin(pi * (hod - 6.5) / 12.0));
        const double solar_season = 0.75 + 0.25 * std::cos(2.0 * pi * (day - 172) / 365.0);
        for (const auto& g : net.generators) {
            if (g.kind == GenKind::solar) {
                s.vre_capacity_factor[g.id] = std::clamp(light * solar_season * cloud * (0.95 + 0.05 * su(srng)), 0.0, 1.0);
            } else if (g.kind == GenKind::wind) {
                double& z = wind_state[g.id];
                z = 0.95 * z + 0.31 * gauss(srng);
                s.vre_capacity_factor[g.id] = std::clamp(0.4 + 0.25 * z, 0.0, 1.0);
            }
        }
        out.scenarios.push_back(std::move(s));
    }
    return out;
}

}  // namespace lmesim
