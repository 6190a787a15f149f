#include "lmesim/analysis.hpp"
#include "lmesim/config.hpp"
#include "lmesim/errors.hpp"
#include "lmesim/interventions.hpp"
#include "lmesim/simulation.hpp"
#include "lmesim/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace lmesim;

namespace {

struct Overrides {
    std::string config;
    std::optional<int> hours;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "run configuration (JSON)");
    cmd->add_option("--hours", o.hours, "use only the first N hours")->check(CLI::NonNegativeNumber);
    cmd->add_option("--workers", o.workers, "worker threads (default: LMESIM_WORKERS or 1)")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "seed for every random draw");
    cmd->add_option("--out", o.out, "output directory");
}

RunConfig resolve(const Overrides& o, bool needs_config) {
    if (needs_config && o.config.empty()) throw ConfigError("--config is required");
    RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (o.hours) c.hours = *o.hours;
    if (o.workers) c.workers = *o.workers;
    if (c.workers == 0) c.workers = default_workers();
    if (o.seed) {
        c.seed = *o.seed;
        c.generate.seed = *o.seed;
    }
    if (!o.out.empty()) c.out_dir = o.out;
    return c;
}

std::shared_ptr<const Network> load_case(const RunConfig& c) {
    if (c.case_path.empty()) throw ConfigError("config has no 'case'");
    if (!fs::exists(c.case_path)) throw ConfigError("case file '" + c.case_path.string() + "' does not exist");
    return std::make_shared<const Network>(read_case_file(c.case_path.string()));
}

std::ofstream open_out(const RunConfig& c, const std::string& name) {
    std::error_code ec;
    fs::create_directories(c.out_dir, ec);
    std::ofstream f(c.out_dir / name);
    if (!f) throw ConfigError("cannot write '" + (c.out_dir / name).string() + "'");
    return f;
}

std::string ratio_text(const InterventionReport& r) {
    return r.change_ratio ? std::to_string(*r.change_ratio) + "%" : std::string("n/a");
}

void cmd_simulate(const RunConfig& c) {
    const auto net = load_case(c);
    const auto hours = load_config_scenarios(c, *net);
    SimulationConfig sc;
    sc.out_dir = c.out_dir.string();
    sc.workers = c.workers;
    sc.shed_filter_mwh = c.shed_filter_mwh;
    sc.sensitivity = c.sensitivity();
    sc.write_dispatch = c.write_dispatch;
    const auto s = simulate(net, hours, sc);
    const auto& t = s.accounts.totals;
    std::cout << "hours " << s.hours << ", included " << t.hours_included << ", filtered " << t.hours_filtered
              << "\nscope1 " << t.scope1 << " kg, accounts " << (t.load_total() + t.gen_total() + t.line_total() +
                                                                  t.injection_account)
              << " kg, residual " << t.residual << " kg\noutputs in " << c.out_dir.string() << '\n';
}

void cmd_generate(const RunConfig& c) {
    SyntheticParams p = c.generate;
    if (c.hours) p.hours = *c.hours;
    const auto sc = generate_synthetic(p);
    auto cf = open_out(c, "case.json");
    write_case_json(cf, sc.network);
    auto sf = open_out(c, "scenarios.csv");
    write_scenario_series(sf, sc.network, sc.scenarios);
    std::cout << "wrote " << sc.network.num_buses() << "-bus case and " << sc.scenarios.size() << " hours to "
              << c.out_dir.string() << '\n';
}

void cmd_cluster(const RunConfig& c) {
    const auto net = load_case(c);
    const fs::path series_path = c.cluster.series.empty() ? c.out_dir / files::bus_sensitivity : c.cluster.series;
    std::ifstream in(series_path);
    if (!in) throw ConfigError("cannot open LME series '" + series_path.string() + "'");
    LmeSeries s = read_lme_series(in);
    if (s.values.cols() != net->num_buses())
        throw DataError("LME series has " + std::to_string(s.values.cols()) + " buses, case has " +
                        std::to_string(net->num_buses()));
    std::ifstream hs(series_path.parent_path() / files::hourly_summary);
    if (hs) s = drop_hours(s, read_filtered_hours(hs));
    if (c.hours && s.values.rows() > *c.hours) {
        s.values.conservativeResize(*c.hours, Eigen::NoChange);
        s.hours.resize(*c.hours);
    }

    const auto result = hierarchical_cluster(lme_distance(s), c.cluster.k);
    std::vector<std::string> names, regions;
    for (const auto& b : net->buses) {
        names.push_back(b.name);
        regions.push_back(b.region);
    }
    auto lj = open_out(c, "clusters.json");
    write_linkage_json(lj, result, names);
    auto lc = open_out(c, "cluster_labels.csv");
    lc << "# schema: lmesim.cluster_labels v1\nbus,bus_name,region,label\n";
    for (int b = 0; b < net->num_buses(); ++b)
        lc << b << ',' << names[b] << ',' << regions[b] << ',' << result.labels[b] << '\n';
    auto ah = open_out(c, "lme_by_hour_of_day.csv");
    write_aggregates_csv(ah, temporal_aggregates(s, Grouping::hour_of_day, regions));
    auto am = open_out(c, "lme_by_month.csv");
    write_aggregates_csv(am, temporal_aggregates(s, Grouping::month, regions));
    const auto gaps = gap_ranking(result.linkage);
    std::cout << "clustered " << net->num_buses() << " buses over " << s.values.rows() << " hours into k="
              << c.cluster.k;
    if (gaps.size() >= 2) std::cout << "; largest merge gaps at k=" << gaps[0] << ", " << gaps[1];
    std::cout << '\n';
}

void cmd_shift(const RunConfig& c) {
    const auto net = load_case(c);
    const auto hours = load_config_scenarios(c, *net);
    const auto dcs = resolve_data_centers(c.shift.data_centers, *net);
    if (dcs.empty()) throw ConfigError("shift.data_centers is empty");
    const auto base = run_base_case(net, hours, dcs, c.sensitivity(), c.workers);
    ShiftOptions opt;
    opt.day_length = c.shift.day_length;
    opt.balance = c.shift.balance;
    std::vector<int> hour_ids;
    for (const auto& h : hours) hour_ids.push_back(h.hour_index);
    auto run = [&](const std::string& signal, const Eigen::MatrixXd& coef) {
        const auto plan = shift_optimize(coef, dcs, opt);
        const auto r = evaluate_shift(net, hours, dcs, plan, base, c.sensitivity().dispatch, c.workers);
        auto pf = open_out(c, "shift_plan_" + signal + ".csv");
        write_shift_plan(pf, plan, dcs, hour_ids);
        auto rf = open_out(c, "shift_report_" + signal + ".json");
        write_intervention_report(rf, r, "shift_" + signal);
        std::cout << signal << " signal: expected " << r.expected_change << " kg, realized " << r.realized_change
                  << " kg, ratio " << ratio_text(r) << ", cost change " << r.realized_cost_change << '\n';
    };
    if (c.shift.signal != "lmp") run("lme", base.lme_at_dcs);
    if (c.shift.signal != "lme") run("lmp", base.lmp_at_dcs);
}

void cmd_site(const RunConfig& c) {
    const auto net = load_case(c);
    const auto hours = load_config_scenarios(c, *net);
    const auto r =
        siting_experiment(net, hours, c.site.n_samples, c.site.delta, c.site.kind, c.seed, c.sensitivity(), c.workers);
    const std::string kind = c.site.kind == SitingKind::load ? "load" : "generation";
    auto sf = open_out(c, "siting_samples.csv");
    write_siting_samples(sf, r, *net);
    auto rf = open_out(c, "siting_report.json");
    write_intervention_report(rf, r.report, "site_" + kind);
    std::cout << r.samples.size() << " " << kind << " samples (" << r.infeasible << " infeasible): expected "
              << r.report.expected_change << " kg, realized " << r.report.realized_change << " kg, ratio "
              << ratio_text(r.report) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LME simulation and carbon accounting"};
    app.require_subcommand(1);
    Overrides sim, gen, clu, shi, sit;
    auto* s_sim = app.add_subcommand("simulate", "dispatch, sensitivities and accounts for every hour");
    add_common(s_sim, sim);
    auto* s_gen = app.add_subcommand("generate", "write a synthetic three-region case and scenario series");
    add_common(s_gen, gen);
    std::optional<int> buses, lines, generators;
    s_gen->add_option("--buses", buses)->check(CLI::PositiveNumber);
    s_gen->add_option("--lines", lines)->check(CLI::PositiveNumber);
    s_gen->add_option("--generators", generators)->check(CLI::PositiveNumber);
    auto* s_clu = app.add_subcommand("cluster", "Ward clustering and temporal aggregates of LME series");
    add_common(s_clu, clu);
    std::optional<int> k;
    s_clu->add_option("--k", k, "cluster count")->check(CLI::PositiveNumber);
    auto* s_shi = app.add_subcommand("shift", "data center load shifting experiment");
    add_common(s_shi, shi);
    auto* s_sit = app.add_subcommand("site", "load or generation siting experiment");
    add_common(s_sit, sit);
    std::optional<int> samples;
    std::optional<double> delta;
    std::optional<std::string> kind;
    s_sit->add_option("--samples", samples)->check(CLI::NonNegativeNumber);
    s_sit->add_option("--delta", delta, "MW")->check(CLI::PositiveNumber);
    s_sit->add_option("--kind", kind)->check(CLI::IsMember({"load", "generation"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*s_sim) cmd_simulate(resolve(sim, true));
        if (*s_gen) {
            RunConfig c = resolve(gen, false);
            if (buses) c.generate.buses = *buses;
            if (lines) c.generate.lines = *lines;
            if (generators) c.generate.generators = *generators;
            cmd_generate(c);
        }
        if (*s_clu) {
            RunConfig c = resolve(clu, true);
            if (k) c.cluster.k = *k;
            cmd_cluster(c);
        }
        if (*s_shi) cmd_shift(resolve(shi, true));
        if (*s_sit) {
            RunConfig c = resolve(sit, true);
            if (samples) c.site.n_samples = *samples;
            if (delta) c.site.delta = *delta;
            if (kind) c.site.kind = *kind == "load" ? SitingKind::load : SitingKind::generation;
            cmd_site(c);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
