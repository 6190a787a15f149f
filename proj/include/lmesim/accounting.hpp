#pragma once

#include "lmesim/dispatch.hpp"
#include "lmesim/grid.hpp"
#include "lmesim/sensitivity.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lmesim {

inline constexpr double default_shed_filter_mwh = 100.0;
inline constexpr double default_balance_tol = 1e-6;
inline constexpr double kg_per_mmt = 1e9;

// Emission accounts in kg.  For a single hour `hour` is its index; totals
// use -1.
struct CarbonAccounts {
    int hour = -1;
    Eigen::VectorXd load_account;  // per load: LME at its bus x served load
    Eigen::VectorXd gen_account;   // per generator: (emission rate - LME at its bus) x generation
    Eigen::VectorXd line_account;  // per line: SCI x |flow|
    double injection_account = 0.0;  // fixed injections, priced like zero-emission units
    double scope1 = 0.0;
    double residual = 0.0;  // sum of all accounts - scope1
    double shed_mwh = 0.0;
    bool degenerate = false;
    int hours_included = 0;
    int hours_filtered = 0;

    double load_total() const { return load_account.sum(); }
    double gen_total() const { return gen_account.sum(); }
    double line_total() const { return line_account.sum(); }
};

CarbonAccounts hour_accounts(const TwoTierResult& result, const SensitivityRecord& sens, const HourCase& hc);

double balance_residual(const CarbonAccounts& a);

// True when |residual| <= tol * max(scope1, 1 kg).
bool balanced(const CarbonAccounts& a, double tol = default_balance_tol);

struct LedgerEntry {
    int hour = 0;
    double residual = 0.0;
    double scope1 = 0.0;
    bool degenerate = false;
};

struct AccountSummary {
    CarbonAccounts totals;
    std::vector<int> filtered_hours;
    std::vector<LedgerEntry> ledger;  // degenerate or unbalanced hours, included in totals
};

// Sequential fold in hour order.  Hours whose shed exceeds the threshold are
// counted but left out of the totals.
class AccountAggregator {
public:
    explicit AccountAggregator(double shed_filter_mwh = default_shed_filter_mwh,
                               double balance_tol = default_balance_tol);
    void add(const CarbonAccounts& hour);
    const AccountSummary& summary() const { return summary_; }

private:
    double threshold_;
    double tol_;
    bool first_ = true;
    AccountSummary summary_;
};

CarbonAccounts aggregate_accounts(const std::vector<CarbonAccounts>& hourly, const std::vector<double>& shed_by_hour,
                                  double shed_filter_mwh = default_shed_filter_mwh);

struct GroupAccounts {
    double load = 0.0;
    double gen = 0.0;
    double line = 0.0;  // half of each line's account to each end's region
    double total() const { return load + gen + line; }
};

std::map<GenKind, double> gen_accounts_by_kind(const CarbonAccounts& a, const Network& net);
std::map<std::string, GroupAccounts> accounts_by_region(const CarbonAccounts& a, const Network& net);

void write_accounts_report(std::ostream& out, const AccountSummary& s, const Network& net);
// Rows `entity_type,entity_id,region,kind,account_kg`.
void write_entity_accounts(std::ostream& out, const CarbonAccounts& a, const Network& net);
// Rows `hour,entity_type,entity_id,account_kg`.
void write_hourly_accounts_header(std::ostream& out);
void write_hourly_accounts_rows(std::ostream& out, const CarbonAccounts& a);

}  // namespace lmesim
