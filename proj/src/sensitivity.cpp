#include "lmesim/sensitivity.hpp"

#include "csv.hpp"
#include "lmesim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

namespace lmesim {

using csv::fmt;

bool SensitivityRecord::any_degenerate() const {
    for (bool b : bus_degenerate)
        if (b) return true;
    for (bool b : line_degenerate)
        if (b) return true;
    return false;
}

Eigen::VectorXd compute_lme_dual(const TwoTierResult& r) {
    return r.stage2.demand_dual + (r.stage2.cost_cap_dual * r.cost_cap_slope) * r.stage1.demand_dual;
}

Eigen::VectorXd compute_lmp(const TwoTierResult& r) { return r.stage1.demand_dual; }

Eigen::VectorXd compute_sci_dual(const TwoTierResult& r) {
    return r.stage2.line_limit_dual + (r.stage2.cost_cap_dual * r.cost_cap_slope) * r.stage1.line_limit_dual;
}

double compute_sci(const TwoTierResult& r, const HourCase& hc, int line) {
    if (line < 0 || line >= hc.net().num_lines()) throw DataError("no line " + std::to_string(line));
    return r.stage2.line_limit_dual(line) + r.stage2.cost_cap_dual * r.cost_cap_slope * r.stage1.line_limit_dual(line);
}

namespace {

double base_emissions(const HourCase& hc, const DispatchOptions& opt, const TwoTierResult* base) {
    return base ? base->dispatch().scope1_emissions : lexicographic_dispatch(hc, opt).dispatch().scope1_emissions;
}

// Distinct indices out of 0..n-1, ascending.
std::vector<int> sample_indices(int n, int k, std::mt19937_64& rng) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < k; ++i) std::swap(all[i], all[i + static_cast<int>(rng() % static_cast<std::uint64_t>(n - i))]);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace

double compute_lme_fd(const HourCase& hc, int bus, double epsilon, const DispatchOptions& opt,
                      const TwoTierResult* base) {
    if (!(epsilon > 0.0)) throw ConfigError("finite-difference epsilon must be positive");
    if (bus < 0 || bus >= hc.net().num_buses()) throw DataError("no bus " + std::to_string(bus));
    const double e0 = base_emissions(hc, opt, base);
    const double e1 = lexicographic_dispatch(with_extra_demand(hc, bus, epsilon), opt, base).dispatch().scope1_emissions;
    return (e1 - e0) / epsilon;
}

double compute_sci_fd(const HourCase& hc, int line, double epsilon, const DispatchOptions& opt,
                      const TwoTierResult* base) {
    if (!(epsilon > 0.0)) throw ConfigError("finite-difference epsilon must be positive");
    if (line < 0 || line >= hc.net().num_lines()) throw DataError("no line " + std::to_string(line));
    const double e0 = base_emissions(hc, opt, base);
    auto net = std::make_shared<Network>(hc.net());
    net->lines[line].flow_limit += epsilon;
    HourCase perturbed = hc;
    perturbed.network = std::move(net);
    const double e1 = lexicographic_dispatch(perturbed, opt, base).dispatch().scope1_emissions;
    return (e1 - e0) / epsilon;
}

int sample_count(int n, double rate) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("sample_rate must lie in [0,1]");
    return std::min(n, static_cast<int>(std::lround(rate * n)));
}

SensitivityRecord compute_sensitivities(const HourCase& hc, const TwoTierResult& result,
                                        const SensitivityConfig& config) {
    if (result.hour_index != hc.hour_index)
        throw DataError("sensitivities: result for hour " + std::to_string(result.hour_index) + " given case for hour " +
                        std::to_string(hc.hour_index));
    const int nb = hc.net().num_buses(), nl = hc.net().num_lines();
    SensitivityRecord rec;
    rec.hour = hc.hour_index;
    rec.lme = compute_lme_dual(result);
    rec.lmp = compute_lmp(result);
    rec.sci = compute_sci_dual(result);
    rec.bus_degenerate.assign(nb, false);
    rec.bus_checked.assign(nb, false);
    rec.bus_method.assign(nb, SensitivityMethod::dual);
    rec.line_degenerate.assign(nl, false);
    rec.line_checked.assign(nl, false);
    rec.line_method.assign(nl, SensitivityMethod::dual);

    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(hc.hour_index)};
    std::mt19937_64 rng(seq);
    for (int b : sample_indices(nb, sample_count(nb, config.sample_rate), rng)) {
        const double fd = compute_lme_fd(hc, b, config.fd_epsilon, config.dispatch, &result);
        rec.bus_checked[b] = true;
        if (std::abs(fd - rec.lme(b)) > config.fd_agree_tol) {
            rec.bus_degenerate[b] = true;
            rec.bus_method[b] = SensitivityMethod::finite_difference;
            rec.lme(b) = fd;
        }
    }
    for (int l : sample_indices(nl, sample_count(nl, config.sample_rate), rng)) {
        const double fd = compute_sci_fd(hc, l, config.fd_epsilon, config.dispatch, &result);
        rec.line_checked[l] = true;
        if (std::abs(fd - rec.sci(l)) > config.fd_agree_tol) {
            rec.line_degenerate[l] = true;
            rec.line_method[l] = SensitivityMethod::finite_difference;
            rec.sci(l) = fd;
        }
    }
    for (int b = 0; b < nb; ++b)
        if (!std::isfinite(rec.lme(b))) throw NumericError("hour " + std::to_string(rec.hour) + ": non-finite LME");
    return rec;
}

void write_bus_sensitivity_header(std::ostream& out) {
    out << "# schema: lmesim.bus_sensitivity v1\n"
        << "hour,bus,lme,lmp,degenerate\n";
}

void write_bus_sensitivity_rows(std::ostream& out, const SensitivityRecord& rec) {
    for (Eigen::Index b = 0; b < rec.lme.size(); ++b)
        out << rec.hour << ',' << b << ',' << fmt(rec.lme(b)) << ',' << fmt(rec.lmp(b)) << ','
            << (rec.bus_degenerate[b] ? 1 : 0) << '\n';
}

void write_line_sensitivity_header(std::ostream& out) {
    out << "# schema: lmesim.line_sensitivity v1\n"
        << "hour,line,sci,degenerate\n";
}

void write_line_sensitivity_rows(std::ostream& out, const SensitivityRecord& rec) {
    for (Eigen::Index l = 0; l < rec.sci.size(); ++l)
        out << rec.hour << ',' << l << ',' << fmt(rec.sci(l)) << ',' << (rec.line_degenerate[l] ? 1 : 0) << '\n';
}

}  // namespace lmesim
