#include "lmesim/accounting.hpp"

#include "csv.hpp"
#include "lmesim/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>

namespace lmesim {

using csv::fmt;

CarbonAccounts hour_accounts(const TwoTierResult& result, const SensitivityRecord& sens, const HourCase& hc) {
    if (result.hour_index != hc.hour_index || sens.hour != hc.hour_index)
        throw DataError("accounts: hour mismatch (case " + std::to_string(hc.hour_index) + ", dispatch " +
                        std::to_string(result.hour_index) + ", sensitivities " + std::to_string(sens.hour) + ")");
    const Network& net = hc.net();
    const DispatchSolution& d = result.dispatch();
    CarbonAccounts a;
    a.hour = hc.hour_index;
    a.load_account.resize(net.num_loads());
    for (const auto& ld : net.loads) {
        const double demand = hc.effective_demand(ld.bus);
        const double served_share = demand > 0.0 ? 1.0 - d.shed(ld.bus) / demand : 0.0;
        a.load_account(ld.id) = sens.lme(ld.bus) * hc.load_demand(ld.id) * served_share;
    }
    a.gen_account.resize(net.num_generators());
    for (const auto& g : net.generators)
        a.gen_account(g.id) = (g.emission_rate - sens.lme(g.bus)) * d.generation(g.id);
    a.line_account = sens.sci.cwiseProduct(d.flow.cwiseAbs());
    a.injection_account = 0.0 - sens.lme.dot(hc.injection);
    a.scope1 = d.scope1_emissions;
    a.shed_mwh = d.shed.sum();
    a.degenerate = sens.any_degenerate();
    a.hours_included = 1;
    a.residual = balance_residual(a);
    return a;
}

double balance_residual(const CarbonAccounts& a) {
    return a.load_total() + a.gen_total() + a.line_total() + a.injection_account - a.scope1;
}

bool balanced(const CarbonAccounts& a, double tol) {
    return std::abs(a.residual) <= tol * std::max(a.scope1, 1.0);
}

AccountAggregator::AccountAggregator(double shed_filter_mwh, double balance_tol)
    : threshold_(shed_filter_mwh), tol_(balance_tol) {
    if (!(threshold_ >= 0.0)) throw ConfigError("shed filter threshold must be non-negative");
}

void AccountAggregator::add(const CarbonAccounts& h) {
    auto& t = summary_.totals;
    if (first_) {
        t.load_account = Eigen::VectorXd::Zero(h.load_account.size());
        t.gen_account = Eigen::VectorXd::Zero(h.gen_account.size());
        t.line_account = Eigen::VectorXd::Zero(h.line_account.size());
        first_ = false;
    }
    if (h.shed_mwh > threshold_) {
        ++t.hours_filtered;
        summary_.filtered_hours.push_back(h.hour);
        return;
    }
    if (h.degenerate || !balanced(h, tol_)) summary_.ledger.push_back({h.hour, h.residual, h.scope1, h.degenerate});
    t.load_account += h.load_account;
    t.gen_account += h.gen_account;
    t.line_account += h.line_account;
    t.injection_account += h.injection_account;
    t.scope1 += h.scope1;
    t.residual += h.residual;
    t.shed_mwh += h.shed_mwh;
    t.degenerate = t.degenerate || h.degenerate;
    ++t.hours_included;
}

CarbonAccounts aggregate_accounts(const std::vector<CarbonAccounts>& hourly, const std::vector<double>& shed_by_hour,
                                  double shed_filter_mwh) {
    if (shed_by_hour.size() != hourly.size()) throw DataError("aggregate: shed series length differs from accounts");
    AccountAggregator agg(shed_filter_mwh);
    for (std::size_t i = 0; i < hourly.size(); ++i) {
        CarbonAccounts h = hourly[i];
        h.shed_mwh = shed_by_hour[i];
        agg.add(h);
    }
    return agg.summary().totals;
}

std::map<GenKind, double> gen_accounts_by_kind(const CarbonAccounts& a, const Network& net) {
    std::map<GenKind, double> out;
    for (const auto& g : net.generators) out[g.kind] += a.gen_account(g.id);
    return out;
}

std::map<std::string, GroupAccounts> accounts_by_region(const CarbonAccounts& a, const Network& net) {
    std::map<std::string, GroupAccounts> out;
    for (const auto& d : net.loads) out[net.buses[d.bus].region].load += a.load_account(d.id);
    for (const auto& g : net.generators) out[net.buses[g.bus].region].gen += a.gen_account(g.id);
    for (const auto& l : net.lines) {
        out[net.buses[l.from_bus].region].line += 0.5 * a.line_account(l.id);
        out[net.buses[l.to_bus].region].line += 0.5 * a.line_account(l.id);
    }
    return out;
}

void write_accounts_report(std::ostream& out, const AccountSummary& s, const Network& net) {
    using ojson = nlohmann::ordered_json;
    const auto& t = s.totals;
    auto totals = [&](double scale) {
        return ojson{{"scope1", t.scope1 * scale},
                     {"load", t.load_total() * scale},
                     {"generation", t.gen_total() * scale},
                     {"transmission", t.line_total() * scale},
                     {"injection", t.injection_account * scale},
                     {"residual", t.residual * scale}};
    };
    ojson j;
    j["schema"] = "lmesim.accounts v1";
    j["hours_included"] = t.hours_included;
    j["hours_filtered"] = t.hours_filtered;
    j["filtered_hours"] = s.filtered_hours;
    j["totals_kg"] = totals(1.0);
    j["totals_mmt"] = totals(1.0 / kg_per_mmt);
    ojson kinds = ojson::object();
    if (t.gen_account.size() == net.num_generators())
        for (auto [k, v] : gen_accounts_by_kind(t, net)) kinds[to_string(k)] = v;
    j["generation_by_kind_kg"] = kinds;
    ojson regions = ojson::object();
    if (t.load_account.size() == net.num_loads())
        for (const auto& [r, g] : accounts_by_region(t, net))
            regions[r] = {{"load", g.load}, {"generation", g.gen}, {"transmission", g.line}, {"total", g.total()}};
    j["by_region_kg"] = regions;
    ojson ledger = ojson::array();
    for (const auto& e : s.ledger)
        ledger.push_back({{"hour", e.hour}, {"residual_kg", e.residual}, {"scope1_kg", e.scope1}, {"degenerate", e.degenerate}});
    j["degeneracy_ledger"] = ledger;
    out << j.dump(1) << '\n';
}

void write_entity_accounts(std::ostream& out, const CarbonAccounts& a, const Network& net) {
    out << "# schema: lmesim.entity_accounts v1\n"
        << "entity_type,entity_id,region,kind,account_kg\n";
    for (const auto& d : net.loads)
        out << "load," << d.id << ',' << net.buses[d.bus].region << ",," << fmt(a.load_account(d.id)) << '\n';
    for (const auto& g : net.generators)
        out << "generator," << g.id << ',' << net.buses[g.bus].region << ',' << to_string(g.kind) << ','
            << fmt(a.gen_account(g.id)) << '\n';
    for (const auto& l : net.lines) out << "line," << l.id << ",,," << fmt(a.line_account(l.id)) << '\n';
}

void write_hourly_accounts_header(std::ostream& out) {
    out << "# schema: lmesim.hourly_accounts v1\n"
        << "hour,entity_type,entity_id,account_kg\n";
}

void write_hourly_accounts_rows(std::ostream& out, const CarbonAccounts& a) {
    auto rows = [&](const char* type, const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) out << a.hour << ',' << type << ',' << i << ',' << fmt(v(i)) << '\n';
    };
    rows("load", a.load_account);
    rows("generator", a.gen_account);
    rows("line", a.line_account);
}

}  // namespace lmesim
