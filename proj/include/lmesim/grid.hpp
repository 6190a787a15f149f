#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace lmesim {

enum class GenKind { coal, gas, nuclear, wind, solar, hydro };

inline constexpr GenKind all_gen_kinds[] = {GenKind::coal, GenKind::gas,   GenKind::nuclear,
                                            GenKind::wind, GenKind::solar, GenKind::hydro};

const char* to_string(GenKind kind);
GenKind parse_gen_kind(std::string_view name);  // throws DataError
inline bool is_variable_renewable(GenKind k) { return k == GenKind::wind || k == GenKind::solar; }
inline bool is_zero_carbon(GenKind k) { return k != GenKind::coal && k != GenKind::gas; }

struct Bus {
    int id = 0;
    std::string name;
    std::string region;
    bool operator==(const Bus&) const = default;
};

struct Line {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double susceptance = 0.0;  // MW/rad
    double flow_limit = 0.0;   // MW
    bool operator==(const Line&) const = default;
};

struct Generator {
    int id = 0;
    int bus = 0;
    double p_min = 0.0;          // MW
    double p_max = 0.0;          // MW
    double marginal_cost = 0.0;  // $/MWh
    double emission_rate = 0.0;  // kgCO2/MWh
    GenKind kind = GenKind::gas;
    bool is_vre = false;
    bool operator==(const Generator&) const = default;
};

struct LoadPoint {
    int id = 0;
    int bus = 0;
    double base_demand = 0.0;  // MW
    bool operator==(const LoadPoint&) const = default;
};

inline constexpr double default_shed_cost = 10000.0;

struct Network {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;
    std::vector<LoadPoint> loads;
    double shed_cost = default_shed_cost;  // $/MWh

    int num_buses() const { return static_cast<int>(buses.size()); }
    int num_lines() const { return static_cast<int>(lines.size()); }
    int num_generators() const { return static_cast<int>(generators.size()); }
    int num_loads() const { return static_cast<int>(loads.size()); }

    // Checks every structural invariant; throws DataError naming the entity.
    void validate() const;

    bool operator==(const Network&) const = default;
};

enum class CaseFormat { json, csv_bundle };

// Parses and validates a case.  Entity ids are re-indexed to 0..N-1 in
// ascending order of the ids found in the source; references follow.
Network parse_case(std::istream& source, CaseFormat format);
Network read_case_file(const std::string& path);  // format from extension (.json, else csv bundle)

void write_case_json(std::ostream& out, const Network& net);
void write_case_csv_bundle(std::ostream& out, const Network& net);

// Hourly multipliers keyed by load id and VRE generator id.
struct HourScenario {
    int hour_index = 0;
    std::map<int, double> load_scale;
    std::map<int, double> vre_capacity_factor;
    bool operator==(const HourScenario&) const = default;
};

HourScenario unit_scenario(const Network& net, int hour_index = 0);

// One solvable dispatch period.  `injection` is a fixed must-take net
// injection per bus (zero unless an experiment adds one).
struct HourCase {
    std::shared_ptr<const Network> network;
    int hour_index = 0;
    Eigen::VectorXd effective_demand;  // MW per bus
    Eigen::VectorXd load_demand;       // MW per load
    Eigen::VectorXd effective_pmin;    // MW per generator
    Eigen::VectorXd effective_pmax;    // MW per generator
    Eigen::VectorXd injection;         // MW per bus

    const Network& net() const { return *network; }
};

HourCase apply_scenario(std::shared_ptr<const Network> network, const HourScenario& scenario);

// Copy of `hc` with `mw` more demand at `bus`.
HourCase with_extra_demand(const HourCase& hc, int bus, double mw);
// Copy of `hc` with `mw` more fixed injection at `bus`.
HourCase with_extra_injection(const HourCase& hc, int bus, double mw);

// CSV with header `hour,load_<id>...,vre_<id>...`, one row per hour, hours
// consecutive.  When `net` is given, columns are checked against it.
std::vector<HourScenario> load_scenario_series(std::istream& source, const Network* net = nullptr);
std::vector<HourScenario> read_scenario_file(const std::string& path, const Network* net = nullptr);
void write_scenario_series(std::ostream& out, const Network& net, const std::vector<HourScenario>& series);

}  // namespace lmesim
