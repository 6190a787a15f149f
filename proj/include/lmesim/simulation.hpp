#pragma once

#include "lmesim/accounting.hpp"
#include "lmesim/grid.hpp"
#include "lmesim/sensitivity.hpp"

#include <memory>
#include <string>
#include <vector>

namespace lmesim {

struct SimulationConfig {
    std::string out_dir;
    int workers = 1;
    double shed_filter_mwh = default_shed_filter_mwh;
    double balance_tol = default_balance_tol;
    SensitivityConfig sensitivity;
    bool write_dispatch = true;  // dispatch.csv is the largest file
};

struct HourError {
    int hour = 0;
    std::string kind;  // config, data, numeric
    std::string message;
};

struct SimulationSummary {
    int hours = 0;
    double scope1_all_hours = 0.0;  // kg, including filtered hours
    double cost_all_hours = 0.0;
    double shed_all_hours = 0.0;  // MWh
    double max_abs_residual = 0.0;
    int degenerate_hours = 0;
    AccountSummary accounts;  // included hours only
    std::vector<HourError> errors;
};

// Output file names inside `out_dir`.
namespace files {
inline constexpr const char* dispatch = "dispatch.csv";
inline constexpr const char* bus_sensitivity = "bus_sensitivity.csv";
inline constexpr const char* line_sensitivity = "line_sensitivity.csv";
inline constexpr const char* hourly_accounts = "hourly_accounts.csv";
inline constexpr const char* hourly_summary = "hourly_summary.csv";
inline constexpr const char* entity_accounts = "entity_accounts.csv";
inline constexpr const char* accounts = "accounts.json";
inline constexpr const char* summary = "summary.json";
inline constexpr const char* errors = "errors.csv";
}  // namespace files

// Dispatch, sensitivities and accounts for every hour, streamed to
// `out_dir` in hour order whatever the worker count.  When an hour fails,
// no new hours are started, the error ledger is written, and the first
// failing hour's error is rethrown.  An empty `out_dir` skips all files.
SimulationSummary simulate(std::shared_ptr<const Network> network, const std::vector<HourScenario>& scenarios,
                           const SimulationConfig& config);

void write_summary_json(std::ostream& out, const SimulationSummary& s, const Network& net,
                        const SimulationConfig& config);

// Hours flagged `filtered` in an hourly summary file.
std::vector<int> read_filtered_hours(std::istream& hourly_summary);

// Default worker count: LMESIM_WORKERS when set and positive, else 1.
int default_workers();

}  // namespace lmesim
