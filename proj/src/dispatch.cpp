#include "lmesim/dispatch.hpp"

#include "csv.hpp"
#include "lmesim/errors.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace lmesim {

using csv::fmt;

namespace {

// Column and row layout shared by both stages:
//   columns: generation | angle | flow | shed
//   rows:    flow definition (one per line) | nodal balance (one per bus) | cost cap
struct Layout {
    int ng, nb, nl;
    int gen(int g) const { return g; }
    int angle(int b) const { return ng + b; }
    int flow(int l) const { return ng + nb + l; }
    int shed(int b) const { return ng + nb + nl + b; }
    int flow_row(int l) const { return l; }
    int balance_row(int b) const { return nl + b; }
    int cap_row() const { return nl + nb; }
};

Layout layout_of(const Network& net) { return {net.num_generators(), net.num_buses(), net.num_lines()}; }

LinearProblem build(const HourCase& hc, bool emission_objective) {
    const Network& net = hc.net();
    const Layout lay = layout_of(net);
    LinearProblem p;
    for (const auto& g : net.generators)
        p.add_variable("pg_" + std::to_string(g.id), hc.effective_pmin(g.id), hc.effective_pmax(g.id),
                       emission_objective ? g.emission_rate : g.marginal_cost);
    for (int b = 0; b < lay.nb; ++b)
        p.add_variable("theta_" + std::to_string(b), b == 0 ? 0.0 : -inf, b == 0 ? 0.0 : inf);
    for (const auto& l : net.lines) p.add_variable("f_" + std::to_string(l.id), -l.flow_limit, l.flow_limit);
    for (int b = 0; b < lay.nb; ++b)
        p.add_variable("ls_" + std::to_string(b), 0.0, hc.effective_demand(b), emission_objective ? 0.0 : net.shed_cost);

    for (const auto& l : net.lines)
        p.add_constraint({{lay.angle(l.from_bus), l.susceptance}, {lay.angle(l.to_bus), -l.susceptance},
                          {lay.flow(l.id), -1.0}},
                         Relation::equal, 0.0, "flow_" + std::to_string(l.id));

    std::vector<std::vector<LpTerm>> balance(lay.nb);
    for (const auto& g : net.generators) balance[g.bus].push_back({lay.gen(g.id), 1.0});
    for (const auto& l : net.lines) {
        balance[l.from_bus].push_back({lay.flow(l.id), -1.0});
        balance[l.to_bus].push_back({lay.flow(l.id), 1.0});
    }
    for (int b = 0; b < lay.nb; ++b) {
        balance[b].push_back({lay.shed(b), 1.0});
        p.add_constraint(std::move(balance[b]), Relation::equal, hc.effective_demand(b) - hc.injection(b),
                         "balance_" + std::to_string(b));
    }
    return p;
}

void add_cost_cap(LinearProblem& p, const HourCase& hc, double cap) {
    const Network& net = hc.net();
    const Layout lay = layout_of(net);
    std::vector<LpTerm> terms;
    for (const auto& g : net.generators)
        if (g.marginal_cost != 0.0) terms.push_back({lay.gen(g.id), g.marginal_cost});
    for (int b = 0; b < lay.nb; ++b) terms.push_back({lay.shed(b), net.shed_cost});
    p.add_constraint(std::move(terms), Relation::less_equal, cap, "cost_cap");
}

LpSolution solve_robust(const LinearProblem& p, const DispatchOptions& opt, const LpBasis* start) {
    LpSolution s = solve<double>(p, opt.lp, start);
    if (s.status == LpStatus::numerical_failure) s = solve<long double>(p, opt.lp);
    return s;
}

StageResult extract(const HourCase& hc, const LpSolution& s, bool with_cap) {
    const Network& net = hc.net();
    const Layout lay = layout_of(net);
    StageResult r;
    auto& d = r.dispatch;
    d.generation = s.primal.segment(lay.gen(0), lay.ng);
    d.angle = s.primal.segment(lay.angle(0), lay.nb);
    d.flow = s.primal.segment(lay.flow(0), lay.nl);
    d.shed = s.primal.segment(lay.shed(0), lay.nb);
    for (const auto& g : net.generators) {
        d.total_cost += g.marginal_cost * d.generation(g.id);
        d.scope1_emissions += g.emission_rate * d.generation(g.id);
    }
    d.total_cost += net.shed_cost * d.shed.sum();

    r.balance_dual.resize(lay.nb);
    r.demand_dual.resize(lay.nb);
    for (int b = 0; b < lay.nb; ++b) {
        r.balance_dual(b) = s.dual(lay.balance_row(b));
        r.demand_dual(b) = r.balance_dual(b) + s.upper_bound_dual(lay.shed(b));
    }
    r.line_limit_dual.resize(lay.nl);
    for (int l = 0; l < lay.nl; ++l)
        r.line_limit_dual(l) = s.upper_bound_dual(lay.flow(l)) - s.lower_bound_dual(lay.flow(l));
    if (with_cap) r.cost_cap_dual = s.dual(lay.cap_row());
    r.iterations = s.iterations;
    r.basis = s.basis();
    return r;
}

[[noreturn]] void fail(const HourCase& hc, const char* stage, const LpSolution& s) {
    throw NumericError("hour " + std::to_string(hc.hour_index) + ": " + stage + " LP " + to_string(s.status) +
                       " after " + std::to_string(s.iterations) + " iterations" +
                       (s.diagnostics.empty() ? "" : " (" + s.diagnostics + ")"));
}

double cap_for(double stage1_cost, double tol) { return stage1_cost + tol * std::abs(stage1_cost); }

}  // namespace

LinearProblem dispatch_problem(const HourCase& hc) { return build(hc, false); }

LinearProblem emission_problem(const HourCase& hc, double cost_cap) {
    LinearProblem p = build(hc, true);
    add_cost_cap(p, hc, cost_cap);
    return p;
}

StageResult solve_dcopf(const HourCase& hc, const DispatchOptions& opt, const LpBasis* start) {
    const LinearProblem p = dispatch_problem(hc);
    const LpSolution s = solve_robust(p, opt, start);
    if (!s.optimal()) fail(hc, "dispatch", s);
    return extract(hc, s, false);
}

StageResult solve_emission_tier(const HourCase& hc, double stage1_cost, const DispatchOptions& opt, double* cost_cap,
                                bool* retried, const LpBasis* start) {
    double tol = opt.cost_cap_tol;
    for (int attempt = 0; attempt < 2; ++attempt, tol *= 10.0) {
        const double cap = cap_for(stage1_cost, tol);
        const LinearProblem p = emission_problem(hc, cap);
        const LpSolution s = solve_robust(p, opt, start);
        if (s.optimal()) {
            if (cost_cap) *cost_cap = cap;
            if (retried) *retried = attempt > 0;
            return extract(hc, s, true);
        }
        if (s.status != LpStatus::infeasible || attempt == 1) fail(hc, "emission tier", s);
    }
    throw NumericError("unreachable");
}

TwoTierResult lexicographic_dispatch(const HourCase& hc, const DispatchOptions& opt, const TwoTierResult* warm) {
    TwoTierResult r;
    r.hour_index = hc.hour_index;
    r.stage1 = solve_dcopf(hc, opt, warm ? &warm->stage1.basis : nullptr);
    const double c1 = r.stage1.dispatch.total_cost;
    // stage-1 optimum with a basic cap slack is feasible for stage 2
    LpBasis start = r.stage1.basis;
    start.rows.push_back(1);
    r.stage2 = solve_emission_tier(hc, c1, opt, &r.cost_cap, &r.cap_retried, &start);
    const double tol = r.cap_retried ? 10.0 * opt.cost_cap_tol : opt.cost_cap_tol;
    r.cost_cap_slope = c1 >= 0.0 ? 1.0 + tol : 1.0 - tol;
    return r;
}

void write_dispatch_header(std::ostream& out) {
    out << "# schema: lmesim.dispatch v1\n"
        << "hour,entity_type,entity_id,value\n";
}

void write_dispatch_rows(std::ostream& out, int hour, const DispatchSolution& d) {
    auto rows = [&](const char* type, const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) out << hour << ',' << type << ',' << i << ',' << fmt(v(i)) << '\n';
    };
    rows("generation", d.generation);
    rows("angle", d.angle);
    rows("flow", d.flow);
    rows("shed", d.shed);
    out << hour << ",total_cost,0," << fmt(d.total_cost) << '\n';
    out << hour << ",scope1_emissions,0," << fmt(d.scope1_emissions) << '\n';
}

}  // namespace lmesim
