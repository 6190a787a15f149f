#pragma once

#include "lmesim/dispatch.hpp"
#include "lmesim/grid.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace lmesim {

enum class SensitivityMethod { dual, finite_difference };

struct SensitivityRecord {
    int hour = 0;
    Eigen::VectorXd lme;  // kg/MWh per bus
    Eigen::VectorXd lmp;  // $/MWh per bus
    Eigen::VectorXd sci;  // kg/MWh per line
    std::vector<bool> bus_degenerate;
    std::vector<bool> line_degenerate;
    std::vector<bool> bus_checked;   // a finite-difference check ran
    std::vector<bool> line_checked;
    std::vector<SensitivityMethod> bus_method;
    std::vector<SensitivityMethod> line_method;

    bool any_degenerate() const;
};

struct SensitivityConfig {
    double sample_rate = 0.1;    // share of buses and lines spot-checked each hour
    double fd_epsilon = 0.1;     // MW
    double fd_agree_tol = 1e-3;  // kg/MWh
    std::uint64_t seed = 0;
    DispatchOptions dispatch;
};

// Per-bus derivative of the two-tier emissions with respect to demand:
// stage-2 demand dual plus the cost-cap dual times the stage-1 demand dual.
Eigen::VectorXd compute_lme_dual(const TwoTierResult& result);
Eigen::VectorXd compute_lmp(const TwoTierResult& result);
// Per-line derivative of the two-tier emissions with respect to flow_limit.
Eigen::VectorXd compute_sci_dual(const TwoTierResult& result);
double compute_sci(const TwoTierResult& result, const HourCase& hc, int line);

// Forward differences over full two-tier re-solves.  `base` may carry the
// already solved unperturbed hour.
double compute_lme_fd(const HourCase& hc, int bus, double epsilon, const DispatchOptions& opt = {},
                      const TwoTierResult* base = nullptr);
double compute_sci_fd(const HourCase& hc, int line, double epsilon, const DispatchOptions& opt = {},
                      const TwoTierResult* base = nullptr);

// Number of entities spot-checked out of `n` at `rate`.
int sample_count(int n, double rate);

SensitivityRecord compute_sensitivities(const HourCase& hc, const TwoTierResult& result,
                                        const SensitivityConfig& config = {});

void write_bus_sensitivity_header(std::ostream& out);
void write_bus_sensitivity_rows(std::ostream& out, const SensitivityRecord& rec);
void write_line_sensitivity_header(std::ostream& out);
void write_line_sensitivity_rows(std::ostream& out, const SensitivityRecord& rec);

}  // namespace lmesim
