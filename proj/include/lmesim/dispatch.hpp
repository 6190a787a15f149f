#pragma once

#include "lmesim/grid.hpp"
#include "lmesim/lp.hpp"

#include <Eigen/Core>

#include <iosfwd>

namespace lmesim {

struct DispatchOptions {
    double cost_cap_tol = 1e-9;  // relative slack on the stage-1 cost in stage 2
    LpTolerances lp;
};

struct DispatchSolution {
    Eigen::VectorXd generation;  // MW per generator
    Eigen::VectorXd angle;       // rad per bus, reference bus at 0
    Eigen::VectorXd flow;        // MW per line, positive from_bus -> to_bus
    Eigen::VectorXd shed;        // MW per bus
    double total_cost = 0.0;        // $ (generation cost plus shed penalty)
    double scope1_emissions = 0.0;  // kg
};

// One solved stage.  All duals are derivatives of that stage's objective.
struct StageResult {
    DispatchSolution dispatch;
    Eigen::VectorXd balance_dual;     // per bus, nodal balance row
    Eigen::VectorXd demand_dual;      // per bus, d objective / d demand (balance row plus shed bound)
    Eigen::VectorXd line_limit_dual;  // per line, d objective / d flow_limit
    double cost_cap_dual = 0.0;       // stage 2 only, d objective / d cap
    int iterations = 0;
    LpBasis basis;  // final basis, reusable as a warm start
};

struct TwoTierResult {
    int hour_index = 0;
    StageResult stage1;  // cost minimization
    StageResult stage2;  // emission minimization under the cost cap
    double cost_cap = 0.0;        // $ bound used in stage 2
    double cost_cap_slope = 1.0;  // d cost_cap / d stage-1 cost
    bool cap_retried = false;     // stage 2 needed the widened tolerance

    // Canonical hourly dispatch.
    const DispatchSolution& dispatch() const { return stage2.dispatch; }
};

// Reference bus is bus 0 (the lowest id after re-indexing).
LinearProblem dispatch_problem(const HourCase& hc);
// Same feasible set plus the cost cap row; objective is emissions.
LinearProblem emission_problem(const HourCase& hc, double cost_cap);

// Throws NumericError if the LP cannot be solved to optimality.
StageResult solve_dcopf(const HourCase& hc, const DispatchOptions& opt = {}, const LpBasis* start = nullptr);
StageResult solve_emission_tier(const HourCase& hc, double stage1_cost, const DispatchOptions& opt = {},
                                double* cost_cap = nullptr, bool* retried = nullptr,
                                const LpBasis* start = nullptr);
// `warm` is a solved nearby hour (same network shape) whose stage-1 basis
// seeds stage 1; stage 2 always starts from this hour's stage-1 basis.
TwoTierResult lexicographic_dispatch(const HourCase& hc, const DispatchOptions& opt = {},
                                     const TwoTierResult* warm = nullptr);

// Rows `hour,entity_type,entity_id,value`; entity types are generation,
// angle, flow, shed, total_cost, scope1_emissions.
void write_dispatch_header(std::ostream& out);
void write_dispatch_rows(std::ostream& out, int hour, const DispatchSolution& d);

}  // namespace lmesim
