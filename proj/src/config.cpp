#include "lmesim/config.hpp"

#include "lmesim/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace lmesim {

namespace {

using json = nlohmann::json;

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double real(const json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return obj[key].get<double>();
}

long long whole(const json& obj, const char* key, long long fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    return obj[key].get<long long>();
}

std::string text(const json& obj, const char* key, const std::string& fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return obj[key].get<std::string>();
}

std::filesystem::path path_of(const json& obj, const char* key, const std::filesystem::path& base) {
    const std::string p = text(obj, key, "", "config");
    if (p.empty()) return {};
    const std::filesystem::path fp(p);
    return fp.is_absolute() || base.empty() ? fp : base / fp;
}

}  // namespace

SensitivityConfig RunConfig::sensitivity() const {
    SensitivityConfig s;
    s.sample_rate = fd_sample_rate;
    s.fd_epsilon = fd_epsilon;
    s.seed = seed;
    s.dispatch.cost_cap_tol = cost_cap_tol;
    return s;
}

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    only_keys(j, "config",
              {"case", "scenarios", "out", "hours", "workers", "seed", "shed_filter_mwh", "fd_sample_rate",
               "fd_epsilon", "cost_cap_tol", "write_dispatch", "cluster", "shift", "site", "generate"});
    RunConfig c;
    c.case_path = path_of(j, "case", base_dir);
    c.scenario_path = path_of(j, "scenarios", base_dir);
    if (j.contains("out")) c.out_dir = path_of(j, "out", base_dir);
    if (j.contains("hours")) c.hours = static_cast<int>(whole(j, "hours", 0, "config"));
    c.workers = static_cast<int>(whole(j, "workers", c.workers, "config"));
    const long long seed = whole(j, "seed", 0, "config");
    if (seed < 0) throw ConfigError("config.seed: must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.generate.seed = c.seed;
    c.shed_filter_mwh = real(j, "shed_filter_mwh", c.shed_filter_mwh, "config");
    c.fd_sample_rate = real(j, "fd_sample_rate", c.fd_sample_rate, "config");
    c.fd_epsilon = real(j, "fd_epsilon", c.fd_epsilon, "config");
    c.cost_cap_tol = real(j, "cost_cap_tol", c.cost_cap_tol, "config");
    if (j.contains("write_dispatch")) {
        if (!j["write_dispatch"].is_boolean()) throw ConfigError("config.write_dispatch: expected true or false");
        c.write_dispatch = j["write_dispatch"].get<bool>();
    }

    if (j.contains("cluster")) {
        const auto& o = j["cluster"];
        only_keys(o, "cluster", {"k", "series"});
        c.cluster.k = static_cast<int>(whole(o, "k", c.cluster.k, "cluster"));
        c.cluster.series = path_of(o, "series", base_dir);
    }
    if (j.contains("shift")) {
        const auto& o = j["shift"];
        only_keys(o, "shift", {"data_centers", "signal", "day_length", "balance"});
        c.shift.signal = text(o, "signal", c.shift.signal, "shift");
        if (c.shift.signal != "lme" && c.shift.signal != "lmp" && c.shift.signal != "both")
            throw ConfigError("shift.signal: expected lme, lmp or both");
        c.shift.day_length = static_cast<int>(whole(o, "day_length", c.shift.day_length, "shift"));
        const std::string bal = text(o, "balance", "joint", "shift");
        if (bal == "joint")
            c.shift.balance = BalanceMode::joint;
        else if (bal == "per_dc")
            c.shift.balance = BalanceMode::per_dc;
        else
            throw ConfigError("shift.balance: expected joint or per_dc");
        if (o.contains("data_centers")) {
            if (!o["data_centers"].is_array()) throw ConfigError("shift.data_centers: expected an array");
            for (const auto& d : o["data_centers"]) {
                const std::string where = "shift.data_centers[" + std::to_string(c.shift.data_centers.size()) + "]";
                only_keys(d, where, {"name", "bus", "base_load", "shift_fraction"});
                DataCenterEntry e;
                if (!d.contains("bus")) throw ConfigError(where + ": missing 'bus'");
                e.bus = d["bus"].is_string() ? d["bus"].get<std::string>() : d["bus"].dump();
                e.name = text(d, "name", "dc" + std::to_string(c.shift.data_centers.size()), where);
                if (!d.contains("base_load")) throw ConfigError(where + ": missing 'base_load'");
                e.base_load = real(d, "base_load", 0.0, where);
                e.shift_fraction = real(d, "shift_fraction", e.shift_fraction, where);
                c.shift.data_centers.push_back(e);
            }
        }
    }
    if (j.contains("site")) {
        const auto& o = j["site"];
        only_keys(o, "site", {"n_samples", "delta", "kind"});
        c.site.n_samples = static_cast<int>(whole(o, "n_samples", c.site.n_samples, "site"));
        c.site.delta = real(o, "delta", c.site.delta, "site");
        const std::string kind = text(o, "kind", "load", "site");
        if (kind == "load")
            c.site.kind = SitingKind::load;
        else if (kind == "generation")
            c.site.kind = SitingKind::generation;
        else
            throw ConfigError("site.kind: expected load or generation");
    }
    if (j.contains("generate")) {
        const auto& o = j["generate"];
        only_keys(o, "generate", {"buses", "lines", "generators", "loads", "hours", "mix"});
        auto& g = c.generate;
        g.buses = static_cast<int>(whole(o, "buses", g.buses, "generate"));
        g.lines = static_cast<int>(whole(o, "lines", g.lines, "generate"));
        g.generators = static_cast<int>(whole(o, "generators", g.generators, "generate"));
        g.loads = static_cast<int>(whole(o, "loads", g.loads, "generate"));
        g.hours = static_cast<int>(whole(o, "hours", g.hours, "generate"));
        if (o.contains("mix")) {
            if (!o["mix"].is_object()) throw ConfigError("generate.mix: expected an object of kind -> share");
            g.mix.clear();
            for (const auto& [k, v] : o["mix"].items()) {
                GenKind kind;
                try {
                    kind = parse_gen_kind(k);
                } catch (const Error& e) {
                    throw ConfigError(std::string("generate.mix: ") + e.what());
                }
                if (!v.is_number()) throw ConfigError("generate.mix." + k + ": expected a number");
                g.mix[kind] = v.get<double>();
            }
        }
    }

    if (c.hours && *c.hours < 0) throw ConfigError("config.hours: must be non-negative");
    if (c.workers < 0) throw ConfigError("config.workers: must be non-negative");
    if (!(c.shed_filter_mwh >= 0.0)) throw ConfigError("config.shed_filter_mwh: must be non-negative");
    if (!(c.fd_sample_rate >= 0.0 && c.fd_sample_rate <= 1.0)) throw ConfigError("config.fd_sample_rate: must lie in [0, 1]");
    if (!(c.fd_epsilon > 0.0)) throw ConfigError("config.fd_epsilon: must be positive");
    if (!(c.cost_cap_tol >= 0.0)) throw ConfigError("config.cost_cap_tol: must be non-negative");
    if (c.cluster.k < 1) throw ConfigError("cluster.k: must be >= 1");
    if (c.shift.day_length < 1) throw ConfigError("shift.day_length: must be >= 1");
    if (c.site.n_samples < 0) throw ConfigError("site.n_samples: must be non-negative");
    if (!(c.site.delta > 0.0)) throw ConfigError("site.delta: must be positive");
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), path.parent_path());
}

std::vector<DataCenterSpec> resolve_data_centers(const std::vector<DataCenterEntry>& entries, const Network& net) {
    std::vector<DataCenterSpec> out;
    for (const auto& e : entries) {
        int bus = -1;
        for (const auto& b : net.buses)
            if (b.name == e.bus) bus = b.id;
        if (bus < 0 && !e.bus.empty() && e.bus.find_first_not_of("0123456789") == std::string::npos) {
            const long idx = std::stol(e.bus);
            if (idx < net.num_buses()) bus = static_cast<int>(idx);
        }
        if (bus < 0) throw DataError("data center '" + e.name + "': no bus named or numbered '" + e.bus + "'");
        out.push_back({e.name, bus, e.base_load, e.shift_fraction});
    }
    validate_data_centers(out, net);
    return out;
}

std::vector<HourScenario> load_config_scenarios(const RunConfig& cfg, const Network& net) {
    std::vector<HourScenario> s;
    if (!cfg.scenario_path.empty()) {
        if (!std::filesystem::exists(cfg.scenario_path))
            throw ConfigError("scenario file '" + cfg.scenario_path.string() + "' does not exist");
        s = read_scenario_file(cfg.scenario_path.string(), &net);
    } else {
        const int n = cfg.hours.value_or(1);
        for (int h = 0; h < n; ++h) s.push_back(unit_scenario(net, h));
    }
    if (cfg.hours && static_cast<int>(s.size()) > *cfg.hours) s.resize(*cfg.hours);
    return s;
}

}  // namespace lmesim
