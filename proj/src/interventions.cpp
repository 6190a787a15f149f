#include "lmesim/interventions.hpp"

#include "csv.hpp"
#include "lmesim/errors.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <ostream>
#include <random>

namespace lmesim {

using csv::fmt;

void validate_data_centers(const std::vector<DataCenterSpec>& dcs, const Network& net) {
    for (const auto& dc : dcs) {
        const std::string who = "data center '" + dc.name + "'";
        if (!(dc.base_load >= 0.0) || !std::isfinite(dc.base_load)) throw ConfigError(who + ": base_load must be >= 0");
        if (!(dc.shift_fraction >= 0.0 && dc.shift_fraction <= 1.0))
            throw ConfigError(who + ": shift_fraction must lie in [0, 1]");
        if (dc.bus < 0 || dc.bus >= net.num_buses()) throw DataError(who + ": unknown bus " + std::to_string(dc.bus));
    }
}

HourCase with_data_centers(const HourCase& hc, const std::vector<DataCenterSpec>& dcs, const Eigen::VectorXd* delta) {
    HourCase out = hc;
    for (std::size_t i = 0; i < dcs.size(); ++i)
        out.effective_demand(dcs[i].bus) += dcs[i].base_load + (delta ? (*delta)(static_cast<Eigen::Index>(i)) : 0.0);
    return out;
}

BaseCase run_base_case(std::shared_ptr<const Network> network, const std::vector<HourScenario>& scenarios,
                       const std::vector<DataCenterSpec>& dcs, const SensitivityConfig& config, int workers) {
    validate_data_centers(dcs, *network);
    const int hours = static_cast<int>(scenarios.size());
    const auto n_dc = static_cast<Eigen::Index>(dcs.size());
    BaseCase b;
    b.dispatch.resize(hours);
    b.sens.resize(hours);
    b.lme_at_dcs.resize(hours, n_dc);
    b.lmp_at_dcs.resize(hours, n_dc);
    detail::parallel_for(hours, workers, [&](int t) {
        const HourCase hc = with_data_centers(apply_scenario(network, scenarios[t]), dcs);
        b.dispatch[t] = lexicographic_dispatch(hc, config.dispatch);
        b.sens[t] = compute_sensitivities(hc, b.dispatch[t], config);
        for (Eigen::Index i = 0; i < n_dc; ++i) {
            b.lme_at_dcs(t, i) = b.sens[t].lme(dcs[i].bus);
            b.lmp_at_dcs(t, i) = b.sens[t].lmp(dcs[i].bus);
        }
    });
    for (const auto& r : b.dispatch) {
        b.emissions += r.dispatch().scope1_emissions;
        b.cost += r.stage1.dispatch.total_cost;
    }
    return b;
}

namespace {

// Window [t0, t1): variables up/down per (hour, dc), delta = up - down.
struct WindowLp {
    LinearProblem lp;
    int t0, t1, n_dc;
    int up(int t, int i) const { return 2 * ((t - t0) * n_dc + i); }
    int down(int t, int i) const { return up(t, i) + 1; }
};

WindowLp window_problem(const Eigen::MatrixXd& signal, const std::vector<DataCenterSpec>& dcs, int t0, int t1,
                        BalanceMode balance) {
    WindowLp w{{}, t0, t1, static_cast<int>(dcs.size())};
    for (int t = t0; t < t1; ++t)
        for (int i = 0; i < w.n_dc; ++i) {
            const double cap = dcs[i].max_shift();
            w.lp.add_variable("up_" + std::to_string(t) + "_" + std::to_string(i), 0.0, cap, signal(t, i));
            w.lp.add_variable("down_" + std::to_string(t) + "_" + std::to_string(i), 0.0, cap, -signal(t, i));
        }
    auto balance_row = [&](int only_dc) {
        std::vector<LpTerm> terms;
        for (int t = t0; t < t1; ++t)
            for (int i = 0; i < w.n_dc; ++i)
                if (only_dc < 0 || i == only_dc) {
                    terms.push_back({w.up(t, i), 1.0});
                    terms.push_back({w.down(t, i), -1.0});
                }
        w.lp.add_constraint(std::move(terms), Relation::equal, 0.0, "balance");
    };
    if (balance == BalanceMode::joint)
        balance_row(-1);
    else
        for (int i = 0; i < w.n_dc; ++i) balance_row(i);
    return w;
}

void solve_window(const Eigen::MatrixXd& signal, const std::vector<DataCenterSpec>& dcs, int t0, int t1,
                  const ShiftOptions& opt, Eigen::MatrixXd& delta) {
    WindowLp w = window_problem(signal, dcs, t0, t1, opt.balance);
    const LpSolution first = solve(w.lp, opt.lp);
    if (!first.optimal())
        throw NumericError("shift window starting at hour " + std::to_string(t0) + ": LP " + to_string(first.status));

    // Among optimal plans prefer the least total movement.
    std::vector<LpTerm> objective;
    double scale = 1.0;
    for (int v = 0; v < w.lp.num_variables(); ++v) {
        objective.push_back({v, w.lp.cost(v)});
        scale += std::abs(w.lp.cost(v)) * w.lp.upper(v);
        w.lp.set_cost(v, 1.0);
    }
    const int cap_row = w.lp.add_constraint(std::move(objective), Relation::less_equal, first.objective_value, "optimal");
    LpSolution second = solve(w.lp, opt.lp);
    if (!second.optimal()) {
        w.lp.set_rhs(cap_row, first.objective_value + 1e-9 * scale);
        second = solve(w.lp, opt.lp);
    }
    const LpSolution& s = second.optimal() ? second : first;
    for (int t = t0; t < t1; ++t)
        for (int i = 0; i < w.n_dc; ++i) {
            const double cap = dcs[i].max_shift();
            double d = s.primal(w.up(t, i)) - s.primal(w.down(t, i));
            // basic variables resting on a bound carry pivot round-off
            if (std::abs(std::abs(d) - cap) <= 1e-9 * std::max(cap, 1.0)) d = std::copysign(cap, d);
            if (std::abs(d) <= 1e-12 * std::max(cap, 1.0)) d = 0.0;
            delta(t, i) = d;
        }
}

}  // namespace

ShiftPlan shift_optimize(const Eigen::MatrixXd& signal, const std::vector<DataCenterSpec>& dcs,
                         const ShiftOptions& options) {
    if (options.day_length < 1) throw ConfigError("shift: day_length must be >= 1");
    if (signal.cols() != static_cast<Eigen::Index>(dcs.size()))
        throw DataError("shift: signal has " + std::to_string(signal.cols()) + " columns for " +
                        std::to_string(dcs.size()) + " data centers");
    if (!signal.allFinite()) throw DataError("shift: signal contains non-finite values");
    for (const auto& dc : dcs)
        if (!(dc.base_load >= 0.0 && dc.shift_fraction >= 0.0 && dc.shift_fraction <= 1.0))
            throw ConfigError("shift: data center '" + dc.name + "' out of range");

    const int hours = static_cast<int>(signal.rows());
    ShiftPlan plan;
    plan.delta = Eigen::MatrixXd::Zero(hours, signal.cols());
    if (dcs.empty()) return plan;
    const int windows = (hours + options.day_length - 1) / options.day_length;
    for (int d = 0; d < windows; ++d) {
        const int t0 = d * options.day_length;
        solve_window(signal, dcs, t0, std::min(hours, t0 + options.day_length), options, plan.delta);
    }
    plan.expected_change = plan.delta.cwiseProduct(signal).sum();
    return plan;
}

ShiftPlan lmp_shift(const Eigen::MatrixXd& lmp, const std::vector<DataCenterSpec>& dcs, const ShiftOptions& options) {
    return shift_optimize(lmp, dcs, options);
}

std::string plan_violation(const ShiftPlan& plan, const std::vector<DataCenterSpec>& dcs, int day_length,
                           BalanceMode balance, double tol) {
    if (plan.delta.cols() != static_cast<Eigen::Index>(dcs.size())) return "column count differs from data centers";
    const Eigen::Index hours = plan.delta.rows();
    for (Eigen::Index t = 0; t < hours; ++t)
        for (Eigen::Index i = 0; i < plan.delta.cols(); ++i)
            if (std::abs(plan.delta(t, i)) > dcs[i].max_shift() + tol)
                return "hour " + std::to_string(t) + " dc " + dcs[i].name + ": |delta| " + fmt(plan.delta(t, i)) +
                       " exceeds " + fmt(dcs[i].max_shift());
    for (Eigen::Index t0 = 0; t0 < hours; t0 += day_length) {
        const auto len = std::min<Eigen::Index>(day_length, hours - t0);
        const auto block = plan.delta.middleRows(t0, len);
        if (balance == BalanceMode::joint) {
            if (std::abs(block.sum()) > tol) return "window at hour " + std::to_string(t0) + " nets " + fmt(block.sum());
        } else {
            for (Eigen::Index i = 0; i < block.cols(); ++i)
                if (std::abs(block.col(i).sum()) > tol)
                    return "window at hour " + std::to_string(t0) + " dc " + dcs[i].name + " nets " +
                           fmt(block.col(i).sum());
        }
    }
    return {};
}

std::optional<double> change_ratio(double expected, double realized) {
    if (expected == 0.0) return std::nullopt;
    return 100.0 * realized / expected;
}

InterventionReport evaluate_shift(std::shared_ptr<const Network> network, const std::vector<HourScenario>& scenarios,
                                  const std::vector<DataCenterSpec>& dcs, const ShiftPlan& plan, const BaseCase& base,
                                  const DispatchOptions& options, int workers) {
    const int hours = static_cast<int>(scenarios.size());
    if (plan.delta.rows() != hours || static_cast<int>(base.dispatch.size()) != hours ||
        plan.delta.cols() != static_cast<Eigen::Index>(dcs.size()) || base.lme_at_dcs.cols() != plan.delta.cols())
        throw DataError("evaluate_shift: plan, base case and scenarios disagree in shape");
    InterventionReport r;
    r.hourly_realized.assign(hours, 0.0);
    std::vector<double> cost(hours, 0.0);
    detail::parallel_for(hours, workers, [&](int t) {
        const Eigen::VectorXd row = plan.delta.row(t).transpose();
        if (row.cwiseAbs().maxCoeff() == 0.0) return;  // identical to the base hour
        const auto s = lexicographic_dispatch(with_data_centers(apply_scenario(network, scenarios[t]), dcs, &row), options);
        r.hourly_realized[t] = s.dispatch().scope1_emissions - base.dispatch[t].dispatch().scope1_emissions;
        cost[t] = s.stage1.dispatch.total_cost - base.dispatch[t].stage1.dispatch.total_cost;
    });
    for (int t = 0; t < hours; ++t) {
        r.realized_change += r.hourly_realized[t];
        r.realized_cost_change += cost[t];
    }
    for (std::size_t i = 0; i < dcs.size(); ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        r.entity_names.push_back(dcs[i].name);
        r.entity_expected.push_back(plan.delta.col(c).dot(base.lme_at_dcs.col(c)));
        r.expected_change += r.entity_expected.back();
        r.expected_cost_change += plan.delta.col(c).dot(base.lmp_at_dcs.col(c));
    }
    r.change_ratio = change_ratio(r.expected_change, r.realized_change);
    return r;
}

SitingResult siting_experiment(std::shared_ptr<const Network> network, const std::vector<HourScenario>& scenarios,
                               int n_samples, double delta, SitingKind kind, std::uint64_t seed,
                               const SensitivityConfig& config, int workers) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("siting: delta must be > 0");
    if (n_samples < 0) throw ConfigError("siting: n_samples must be >= 0");
    SitingResult out;
    out.seed = seed;
    if (n_samples == 0) return out;
    if (scenarios.empty()) throw ConfigError("siting: no scenario hours to sample");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_bus(0, network->num_buses() - 1);
    std::uniform_int_distribution<int> pick_hour(0, static_cast<int>(scenarios.size()) - 1);
    out.samples.resize(n_samples);
    for (auto& s : out.samples) {
        s.bus = pick_bus(rng);
        s.hour = pick_hour(rng);
    }

    std::map<int, int> slot;  // hour -> index into the base arrays
    for (const auto& s : out.samples) slot.emplace(s.hour, 0);
    std::vector<int> hours;
    for (auto& [h, i] : slot) {
        i = static_cast<int>(hours.size());
        hours.push_back(h);
    }
    std::vector<HourCase> cases(hours.size());
    std::vector<TwoTierResult> base(hours.size());
    std::vector<SensitivityRecord> sens(hours.size());
    detail::parallel_for(static_cast<int>(hours.size()), workers, [&](int k) {
        cases[k] = apply_scenario(network, scenarios[hours[k]]);
        base[k] = lexicographic_dispatch(cases[k], config.dispatch);
        sens[k] = compute_sensitivities(cases[k], base[k], config);
    });

    const double sign = kind == SitingKind::load ? 1.0 : -1.0;
    detail::parallel_for(n_samples, workers, [&](int j) {
        SitingSample& s = out.samples[j];
        const int k = slot.at(s.hour);
        s.lme = sens[k].lme(s.bus);
        s.degenerate = sens[k].bus_degenerate[s.bus];
        s.expected = sign * s.lme * delta;
        const HourCase perturbed = kind == SitingKind::load ? with_extra_demand(cases[k], s.bus, delta)
                                                             : with_extra_injection(cases[k], s.bus, delta);
        try {
            const auto r = lexicographic_dispatch(perturbed, config.dispatch);
            s.realized = r.dispatch().scope1_emissions - base[k].dispatch().scope1_emissions;
        } catch (const NumericError&) {
            s.feasible = false;
        }
    });

    auto& r = out.report;
    for (const auto& s : out.samples) {
        r.entity_names.push_back("bus" + std::to_string(s.bus) + "@" + std::to_string(s.hour));
        r.entity_expected.push_back(s.feasible ? s.expected : 0.0);
        if (!s.feasible) {
            ++out.infeasible;
            continue;
        }
        r.expected_change += s.expected;
        r.realized_change += s.realized;
    }
    r.change_ratio = change_ratio(r.expected_change, r.realized_change);
    return out;
}

void write_shift_plan(std::ostream& out, const ShiftPlan& plan, const std::vector<DataCenterSpec>& dcs,
                      const std::vector<int>& hours) {
    out << "# schema: lmesim.shift_plan v1\n"
        << "hour,data_center,bus,delta_mw\n";
    for (Eigen::Index t = 0; t < plan.delta.rows(); ++t)
        for (Eigen::Index i = 0; i < plan.delta.cols(); ++i)
            out << (t < static_cast<Eigen::Index>(hours.size()) ? hours[t] : static_cast<int>(t)) << ','
                << dcs[i].name << ',' << dcs[i].bus << ',' << fmt(plan.delta(t, i)) << '\n';
}

void write_siting_samples(std::ostream& out, const SitingResult& r, const Network& net) {
    out << "# schema: lmesim.siting_samples v1\n"
        << "sample,bus,bus_name,hour,lme,degenerate,feasible,expected_kg,realized_kg\n";
    for (std::size_t j = 0; j < r.samples.size(); ++j) {
        const auto& s = r.samples[j];
        out << j << ',' << s.bus << ',' << net.buses[s.bus].name << ',' << s.hour << ',' << fmt(s.lme) << ','
            << int(s.degenerate) << ',' << int(s.feasible) << ',' << fmt(s.expected) << ',' << fmt(s.realized) << '\n';
    }
}

void write_intervention_report(std::ostream& out, const InterventionReport& r, const std::string& experiment) {
    nlohmann::ordered_json j;
    j["schema"] = "lmesim.intervention v1";
    j["experiment"] = experiment;
    j["expected_change_kg"] = r.expected_change;
    j["realized_change_kg"] = r.realized_change;
    j["change_ratio_percent"] = r.change_ratio ? nlohmann::ordered_json(*r.change_ratio) : nlohmann::ordered_json();
    j["expected_cost_change"] = r.expected_cost_change;
    j["realized_cost_change"] = r.realized_cost_change;
    auto entities = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.entity_names.size(); ++i)
        entities.push_back({{"name", r.entity_names[i]}, {"expected_change_kg", r.entity_expected[i]}});
    j["entities"] = entities;
    j["hourly_realized_kg"] = r.hourly_realized;
    out << j.dump(1) << '\n';
}

}  // namespace lmesim
