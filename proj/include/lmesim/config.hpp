#pragma once

#include "lmesim/interventions.hpp"
#include "lmesim/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lmesim {

// Data center as written in a config; `bus` is a bus name or a 0-based
// bus index in the loaded case.
struct DataCenterEntry {
    std::string name;
    std::string bus;
    double base_load = 0.0;
    double shift_fraction = 0.2;
};

struct RunConfig {
    std::filesystem::path case_path;
    std::filesystem::path scenario_path;
    std::filesystem::path out_dir = "out";
    std::optional<int> hours;  // keep only the first N scenario hours
    int workers = 0;  // 0: LMESIM_WORKERS or 1
    std::uint64_t seed = 0;
    double shed_filter_mwh = 100.0;
    double fd_sample_rate = 0.1;
    double fd_epsilon = 0.1;
    double cost_cap_tol = 1e-9;
    bool write_dispatch = true;

    struct Cluster {
        int k = 3;
        std::filesystem::path series;  // bus sensitivity dump; default out_dir/bus_sensitivity.csv
    } cluster;

    struct Shift {
        std::vector<DataCenterEntry> data_centers;
        std::string signal = "both";  // lme, lmp or both
        int day_length = 24;
        BalanceMode balance = BalanceMode::joint;
    } shift;

    struct Site {
        int n_samples = 100;
        double delta = 200.0;  // MW
        SitingKind kind = SitingKind::load;
    } site;

    SyntheticParams generate;

    SensitivityConfig sensitivity() const;
};

// Relative paths resolve against `base_dir`.  Unknown keys are rejected.
// Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

std::vector<DataCenterSpec> resolve_data_centers(const std::vector<DataCenterEntry>& entries, const Network& net);

// Scenario series from the config, or unit scenarios when no path is set,
// truncated to `hours` when given.
std::vector<HourScenario> load_config_scenarios(const RunConfig& cfg, const Network& net);

}  // namespace lmesim
