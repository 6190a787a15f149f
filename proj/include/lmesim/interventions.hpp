#pragma once

#include "lmesim/dispatch.hpp"
#include "lmesim/grid.hpp"
#include "lmesim/sensitivity.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lmesim {

struct DataCenterSpec {
    std::string name;
    int bus = 0;
    double base_load = 0.0;       // MW
    double shift_fraction = 0.2;  // of base_load, each way

    double max_shift() const { return shift_fraction * base_load; }
};

// ConfigError unless sizes and fractions are in range; DataError for an
// unknown bus.  A zero-size data center is allowed.
void validate_data_centers(const std::vector<DataCenterSpec>& dcs, const Network& net);

struct BaseCase {
    std::vector<TwoTierResult> dispatch;   // per hour
    std::vector<SensitivityRecord> sens;  // per hour
    Eigen::MatrixXd lme_at_dcs;            // hours x dcs
    Eigen::MatrixXd lmp_at_dcs;            // hours x dcs
    double emissions = 0.0;                // kg, summed over hours
    double cost = 0.0;                     // $
};

// Hour case with each data center's load (plus `delta.row(t)` when given)
// added at its bus.
HourCase with_data_centers(const HourCase& hc, const std::vector<DataCenterSpec>& dcs,
                           const Eigen::VectorXd* delta = nullptr);

BaseCase run_base_case(std::shared_ptr<const Network> network, const std::vector<HourScenario>& scenarios,
                       const std::vector<DataCenterSpec>& dcs, const SensitivityConfig& config = {}, int workers = 1);

enum class BalanceMode { joint, per_dc };

struct ShiftOptions {
    int day_length = 24;
    BalanceMode balance = BalanceMode::joint;
    LpTolerances lp;
};

struct ShiftPlan {
    Eigen::MatrixXd delta;         // MW, hours x dcs
    double expected_change = 0.0;  // sum of delta x signal
};

// Minimizes sum(signal x delta) per day window subject to |delta| <=
// max_shift and zero net shift per window, then picks the plan with the
// least total |delta| among the optimal ones.  A trailing partial day is
// its own window.  Throws NumericError if a window LP fails.
ShiftPlan shift_optimize(const Eigen::MatrixXd& signal, const std::vector<DataCenterSpec>& dcs,
                         const ShiftOptions& options = {});
// Same program driven by prices; expected_change is then in $.
ShiftPlan lmp_shift(const Eigen::MatrixXd& lmp, const std::vector<DataCenterSpec>& dcs,
                    const ShiftOptions& options = {});

// Box and per-window balance re-check, independent of the LP.  Returns an
// empty string when feasible, otherwise the first violation.
std::string plan_violation(const ShiftPlan& plan, const std::vector<DataCenterSpec>& dcs, int day_length = 24,
                           BalanceMode balance = BalanceMode::joint, double tol = 1e-6);

struct InterventionReport {
    double expected_change = 0.0;  // kg
    double realized_change = 0.0;  // kg
    std::optional<double> change_ratio;  // realized / expected, percent
    double expected_cost_change = 0.0;   // $
    double realized_cost_change = 0.0;   // $
    std::vector<std::string> entity_names;
    std::vector<double> entity_expected;  // kg per data center or per sample
    std::vector<double> hourly_realized;  // kg per hour (shifting only)
};

std::optional<double> change_ratio(double expected, double realized);

// Re-dispatches every hour with the shifted loads.  Expected emissions use
// the base-case LMEs and expected cost the base-case LMPs, whatever signal
// produced the plan.
InterventionReport evaluate_shift(std::shared_ptr<const Network> network, const std::vector<HourScenario>& scenarios,
                                  const std::vector<DataCenterSpec>& dcs, const ShiftPlan& plan, const BaseCase& base,
                                  const DispatchOptions& options = {}, int workers = 1);

enum class SitingKind { load, generation };

struct SitingSample {
    int bus = 0;
    int hour = 0;
    double lme = 0.0;
    bool degenerate = false;
    bool feasible = true;
    double expected = 0.0;  // kg
    double realized = 0.0;  // kg
};

struct SitingResult {
    InterventionReport report;
    std::vector<SitingSample> samples;
    std::uint64_t seed = 0;
    int infeasible = 0;
};

// Samples (bus, hour) pairs uniformly and compares LME x delta (negated for
// generation) with the re-dispatched emission difference.  Infeasible
// samples are counted and left out of the totals.
SitingResult siting_experiment(std::shared_ptr<const Network> network, const std::vector<HourScenario>& scenarios,
                               int n_samples, double delta, SitingKind kind, std::uint64_t seed,
                               const SensitivityConfig& config = {}, int workers = 1);

void write_shift_plan(std::ostream& out, const ShiftPlan& plan, const std::vector<DataCenterSpec>& dcs,
                      const std::vector<int>& hours);
void write_siting_samples(std::ostream& out, const SitingResult& r, const Network& net);
// JSON with expected, realized and ratio plus the breakdowns.
void write_intervention_report(std::ostream& out, const InterventionReport& r, const std::string& experiment);

}  // namespace lmesim
