#include "lmesim/simulation.hpp"

#include "csv.hpp"
#include "lmesim/dispatch.hpp"
#include "lmesim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace lmesim {

using csv::fmt;

namespace {

struct HourOutput {
    int hour = 0;
    CarbonAccounts accounts;
    double cost = 0.0;
    std::string dispatch, bus_sens, line_sens, hourly_accounts;
    std::optional<HourError> error;
    std::exception_ptr exception;
};

std::string kind_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const ConfigError&) {
        return "config";
    } catch (const DataError&) {
        return "data";
    } catch (const NumericError&) {
        return "numeric";
    } catch (...) {
        return "internal";
    }
}

std::string what_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& x) {
        return x.what();
    } catch (...) {
        return "unknown error";
    }
}

HourOutput run_hour(const std::shared_ptr<const Network>& net, const HourScenario& sc, const SimulationConfig& cfg,
                    bool text) {
    HourOutput o;
    o.hour = sc.hour_index;
    try {
        const HourCase hc = apply_scenario(net, sc);
        const auto r = lexicographic_dispatch(hc, cfg.sensitivity.dispatch);
        const auto sens = compute_sensitivities(hc, r, cfg.sensitivity);
        o.accounts = hour_accounts(r, sens, hc);
        o.cost = r.stage1.dispatch.total_cost;
        if (text) {
            std::ostringstream d, b, l, a;
            if (cfg.write_dispatch) write_dispatch_rows(d, o.hour, r.dispatch());
            write_bus_sensitivity_rows(b, sens);
            write_line_sensitivity_rows(l, sens);
            write_hourly_accounts_rows(a, o.accounts);
            o.dispatch = d.str();
            o.bus_sens = b.str();
            o.line_sens = l.str();
            o.hourly_accounts = a.str();
        }
    } catch (...) {
        o.exception = std::current_exception();
        o.error = HourError{o.hour, kind_of(o.exception), what_of(o.exception)};
    }
    return o;
}

struct Sinks {
    std::ofstream dispatch, bus, line, accounts, summary;

    explicit Sinks(const SimulationConfig& cfg) {
        namespace fs = std::filesystem;
        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
        auto open = [&](std::ofstream& f, const char* name) {
            f.open(fs::path(cfg.out_dir) / name);
            if (!f) throw ConfigError("cannot write '" + (fs::path(cfg.out_dir) / name).string() + "'");
        };
        if (cfg.write_dispatch) {
            open(dispatch, files::dispatch);
            write_dispatch_header(dispatch);
        }
        open(bus, files::bus_sensitivity);
        write_bus_sensitivity_header(bus);
        open(line, files::line_sensitivity);
        write_line_sensitivity_header(line);
        open(accounts, files::hourly_accounts);
        write_hourly_accounts_header(accounts);
        open(summary, files::hourly_summary);
        summary << "# schema: lmesim.hourly_summary v1\n"
                << "hour,scope1_kg,cost,shed_mwh,load_kg,generation_kg,transmission_kg,injection_kg,residual_kg,"
                   "degenerate,filtered\n";
    }
};

}  // namespace

std::vector<int> read_filtered_hours(std::istream& in) {
    std::string line;
    long line_no = 0;
    if (!csv::next_record(in, line, line_no)) throw DataError("hourly summary: empty file");
    const auto header = csv::split(line);
    const auto col = [&](std::string_view name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("hourly summary: missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t hour = col("hour"), filtered = col("filtered");
    std::vector<int> out;
    while (csv::next_record(in, line, line_no)) {
        const auto cells = csv::split(line);
        const std::string where = "hourly summary line " + std::to_string(line_no);
        if (cells.size() != header.size()) throw DataError(where + ": expected " + std::to_string(header.size()) + " fields");
        if (csv::to_int(cells[filtered], where) != 0) out.push_back(static_cast<int>(csv::to_int(cells[hour], where)));
    }
    return out;
}

int default_workers() {
    if (const char* env = std::getenv("LMESIM_WORKERS")) {
        try {
            const int n = csv::to_int(env, "LMESIM_WORKERS");
            if (n > 0) return n;
        } catch (const Error&) {
        }
    }
    return 1;
}

SimulationSummary simulate(std::shared_ptr<const Network> network, const std::vector<HourScenario>& scenarios,
                           const SimulationConfig& config) {
    if (config.workers < 1) throw ConfigError("workers must be >= 1");
    if (!(config.shed_filter_mwh >= 0.0)) throw ConfigError("shed filter threshold must be non-negative");
    const bool text = !config.out_dir.empty();
    std::optional<Sinks> sinks;
    if (text) sinks.emplace(config);

    const int n = static_cast<int>(scenarios.size());
    const int workers = std::min(config.workers, std::max(n, 1));
    const int window = 4 * workers;  // hours allowed ahead of the writer

    std::mutex mu;
    std::condition_variable ready, room;
    std::vector<std::optional<HourOutput>> slots(n);
    int written = 0;
    std::atomic<int> next{0};
    std::atomic<bool> abort{false};
    int running = workers;

    auto work = [&] {
        for (;;) {
            const int i = next++;
            if (i >= n) break;
            {
                std::unique_lock lk(mu);
                room.wait(lk, [&] { return i < written + window || abort; });
            }
            if (abort) break;
            HourOutput o = run_hour(network, scenarios[i], config, text);
            {
                std::lock_guard lk(mu);
                if (o.error) abort = true;
                slots[i] = std::move(o);
            }
            ready.notify_all();
        }
        {
            std::lock_guard lk(mu);
            --running;
        }
        ready.notify_all();
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);

    SimulationSummary s;
    AccountAggregator agg(config.shed_filter_mwh, config.balance_tol);
    std::exception_ptr first_error;
    for (; written < n; ++written) {
        HourOutput o;
        {
            std::unique_lock lk(mu);
            ready.wait(lk, [&] { return slots[written].has_value() || running == 0; });
            if (!slots[written]) break;  // never started after an abort
            o = std::move(*slots[written]);
            slots[written].reset();
        }
        room.notify_all();
        if (o.error) {
            s.errors.push_back(*o.error);
            if (!first_error) first_error = o.exception;
            continue;
        }
        if (first_error) continue;
        const auto& a = o.accounts;
        const bool filtered = a.shed_mwh > config.shed_filter_mwh;
        agg.add(a);
        ++s.hours;
        s.scope1_all_hours += a.scope1;
        s.cost_all_hours += o.cost;
        s.shed_all_hours += a.shed_mwh;
        s.max_abs_residual = std::max(s.max_abs_residual, std::abs(a.residual));
        if (a.degenerate) ++s.degenerate_hours;
        if (text) {
            sinks->dispatch << o.dispatch;
            sinks->bus << o.bus_sens;
            sinks->line << o.line_sens;
            sinks->accounts << o.hourly_accounts;
            sinks->summary << o.hour << ',' << fmt(a.scope1) << ',' << fmt(o.cost) << ',' << fmt(a.shed_mwh) << ','
                           << fmt(a.load_total()) << ',' << fmt(a.gen_total()) << ',' << fmt(a.line_total()) << ','
                           << fmt(a.injection_account) << ',' << fmt(a.residual) << ',' << int(a.degenerate) << ','
                           << int(filtered) << '\n';
        }
    }
    {
        std::lock_guard lk(mu);
        abort = true;
    }
    room.notify_all();
    for (auto& t : pool)
        if (t.joinable()) t.join();
    // hours that finished after the writer stopped
    for (auto& slot : slots)
        if (slot && slot->error) s.errors.push_back(*slot->error);
    std::sort(s.errors.begin(), s.errors.end(), [](const auto& a, const auto& b) { return a.hour < b.hour; });
    s.accounts = agg.summary();

    if (text) {
        namespace fs = std::filesystem;
        const fs::path dir(config.out_dir);
        if (!s.errors.empty()) {
            std::ofstream e(dir / files::errors);
            e << "# schema: lmesim.errors v1\nhour,kind,message\n";
            for (const auto& x : s.errors) {
                std::string msg = x.message;
                std::replace(msg.begin(), msg.end(), '\n', ' ');
                std::replace(msg.begin(), msg.end(), ',', ';');
                e << x.hour << ',' << x.kind << ',' << msg << '\n';
            }
        }
        std::ofstream acc(dir / files::accounts);
        write_accounts_report(acc, s.accounts, *network);
        std::ofstream ent(dir / files::entity_accounts);
        if (s.accounts.totals.hours_included > 0) write_entity_accounts(ent, s.accounts.totals, *network);
        std::ofstream sum(dir / files::summary);
        write_summary_json(sum, s, *network, config);
    }
    if (first_error) std::rethrow_exception(first_error);
    return s;
}

void write_summary_json(std::ostream& out, const SimulationSummary& s, const Network& net,
                        const SimulationConfig& config) {
    using ojson = nlohmann::ordered_json;
    const auto& t = s.accounts.totals;
    ojson j;
    j["schema"] = "lmesim.summary v1";
    j["case"] = {{"buses", net.num_buses()},
                 {"lines", net.num_lines()},
                 {"generators", net.num_generators()},
                 {"loads", net.num_loads()}};
    j["seed"] = config.sensitivity.seed;
    j["fd_sample_rate"] = config.sensitivity.sample_rate;
    j["shed_filter_mwh"] = config.shed_filter_mwh;
    j["hours"] = s.hours;
    j["scope1_kg_all_hours"] = s.scope1_all_hours;
    j["cost_all_hours"] = s.cost_all_hours;
    j["shed_mwh_all_hours"] = s.shed_all_hours;
    j["hours_included"] = t.hours_included;
    j["hours_filtered"] = t.hours_filtered;
    j["filtered_hours"] = s.accounts.filtered_hours;
    j["accounts_kg"] = {{"scope1", t.scope1},
                        {"load", t.load_total()},
                        {"generation", t.gen_total()},
                        {"transmission", t.line_total()},
                        {"injection", t.injection_account},
                        {"residual", t.residual}};
    j["max_abs_hour_residual_kg"] = s.max_abs_residual;
    j["degenerate_hours"] = s.degenerate_hours;
    j["ledger_hours"] = s.accounts.ledger.size();
    ojson errs = ojson::array();
    for (const auto& e : s.errors) errs.push_back({{"hour", e.hour}, {"kind", e.kind}, {"message", e.message}});
    j["errors"] = errs;
    out << j.dump(1) << '\n';
}

}  // namespace lmesim
