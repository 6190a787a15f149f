#include "lmesim/grid.hpp"

#include "csv.hpp"
#include "lmesim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace lmesim {

using csv::fmt;

using nlohmann::json;

const char* to_string(GenKind kind) {
    switch (kind) {
        case GenKind::coal: return "coal";
        case GenKind::gas: return "gas";
        case GenKind::nuclear: return "nuclear";
        case GenKind::wind: return "wind";
        case GenKind::solar: return "solar";
        case GenKind::hydro: return "hydro";
    }
    return "unknown";
}

GenKind parse_gen_kind(std::string_view name) {
    for (GenKind k : all_gen_kinds)
        if (name == to_string(k)) return k;
    throw DataError("unknown generator kind '" + std::string(name) + "'");
}

namespace {

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

template <class T>
void sort_unique_ids(std::vector<T>& items, const char* what) {
    std::stable_sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < items.size(); ++i)
        if (items[i].id == items[i - 1].id)
            throw DataError(std::string("duplicate ") + what + " id " + std::to_string(items[i].id));
}

// Source ids per entity, kept so validation errors can name what the user wrote.
struct SourceIds {
    std::vector<int> bus, line, gen, load;
};

template <class T>
std::vector<int> ids_of(const std::vector<T>& items) {
    std::vector<int> out;
    for (const auto& x : items) out.push_back(x.id);
    return out;
}

// Re-indexes every entity to 0..N-1 (ascending source id) and rewrites bus
// references.  Dangling references are reported with the source id.
std::pair<Network, SourceIds> reindex(Network net) {
    sort_unique_ids(net.buses, "bus");
    sort_unique_ids(net.lines, "line");
    sort_unique_ids(net.generators, "generator");
    sort_unique_ids(net.loads, "load");

    std::unordered_map<int, int> bus_index;
    for (std::size_t i = 0; i < net.buses.size(); ++i) bus_index[net.buses[i].id] = static_cast<int>(i);
    auto remap = [&](int bus, const std::string& entity) {
        auto it = bus_index.find(bus);
        if (it == bus_index.end())
            throw DataError(entity + " references missing bus " + std::to_string(bus));
        return it->second;
    };
    for (auto& l : net.lines) {
        l.from_bus = remap(l.from_bus, "line " + std::to_string(l.id));
        l.to_bus = remap(l.to_bus, "line " + std::to_string(l.id));
    }
    for (auto& g : net.generators) g.bus = remap(g.bus, "generator " + std::to_string(g.id));
    for (auto& d : net.loads) d.bus = remap(d.bus, "load " + std::to_string(d.id));

    SourceIds src{ids_of(net.buses), ids_of(net.lines), ids_of(net.generators), ids_of(net.loads)};
    for (std::size_t i = 0; i < net.buses.size(); ++i) net.buses[i].id = static_cast<int>(i);
    for (std::size_t i = 0; i < net.lines.size(); ++i) net.lines[i].id = static_cast<int>(i);
    for (std::size_t i = 0; i < net.generators.size(); ++i) net.generators[i].id = static_cast<int>(i);
    for (std::size_t i = 0; i < net.loads.size(); ++i) net.loads[i].id = static_cast<int>(i);
    return {std::move(net), std::move(src)};
}

// --- JSON ------------------------------------------------------------------

const json& require(const json& obj, const char* key, const std::string& entity) {
    auto it = obj.find(key);
    if (it == obj.end()) throw DataError(entity + ": missing field '" + key + "'");
    return *it;
}

double number(const json& obj, const char* key, const std::string& entity) {
    const json& v = require(obj, key, entity);
    if (!v.is_number()) throw DataError(entity + ": field '" + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const char* key, const std::string& entity, double fallback) {
    return obj.contains(key) ? number(obj, key, entity) : fallback;
}

int integer(const json& obj, const char* key, const std::string& entity) {
    const json& v = require(obj, key, entity);
    if (!v.is_number_integer()) throw DataError(entity + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

std::string text_or(const json& obj, const char* key, const std::string& entity, std::string fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_string()) throw DataError(entity + ": field '" + key + "' must be a string");
    return it->get<std::string>();
}

const json& array_field(const json& root, const char* key) {
    const json& v = require(root, key, "case");
    if (!v.is_array()) throw DataError(std::string("case: '") + key + "' must be an array");
    return v;
}

std::string entity_name(const char* what, const json& obj, std::size_t position) {
    auto it = obj.find("id");
    if (it != obj.end() && it->is_number_integer()) return std::string(what) + " " + std::to_string(it->get<int>());
    return std::string(what) + " #" + std::to_string(position);
}

Generator generator_from(const std::string& entity, int id, int bus, double p_min, double p_max, double cost,
                         double rate, GenKind kind, std::optional<bool> is_vre) {
    Generator g{id, bus, p_min, p_max, cost, rate, kind, is_vre.value_or(is_variable_renewable(kind))};
    if (g.is_vre != is_variable_renewable(kind))
        throw DataError(entity + ": is_vre must be true exactly for wind and solar units");
    return g;
}

Network parse_json(std::istream& in) {
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("case: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw DataError("case: top level must be an object");

    Network net;
    const json& buses = array_field(root, "buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const auto& b = buses[i];
        const std::string e = entity_name("bus", b, i);
        const int id = integer(b, "id", e);
        net.buses.push_back({id, text_or(b, "name", e, "bus" + std::to_string(id)), text_or(b, "region", e, "")});
    }
    const json& lines = array_field(root, "lines");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const std::string e = entity_name("line", l, i);
        net.lines.push_back({integer(l, "id", e), integer(l, "from_bus", e), integer(l, "to_bus", e),
                             number(l, "susceptance", e), number(l, "flow_limit", e)});
    }
    const json& gens = array_field(root, "generators");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto& g = gens[i];
        const std::string e = entity_name("generator", g, i);
        std::optional<bool> vre;
        if (auto it = g.find("is_vre"); it != g.end()) {
            if (!it->is_boolean()) throw DataError(e + ": field 'is_vre' must be a boolean");
            vre = it->get<bool>();
        }
        const json& kind = require(g, "kind", e);
        if (!kind.is_string()) throw DataError(e + ": field 'kind' must be a string");
        net.generators.push_back(generator_from(e, integer(g, "id", e), integer(g, "bus", e),
                                                number_or(g, "p_min", e, 0.0), number(g, "p_max", e),
                                                number(g, "marginal_cost", e), number(g, "emission_rate", e),
                                                parse_gen_kind(kind.get<std::string>()), vre));
    }
    const json& loads = array_field(root, "loads");
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const auto& d = loads[i];
        const std::string e = entity_name("load", d, i);
        net.loads.push_back({integer(d, "id", e), integer(d, "bus", e), number(d, "base_demand", e)});
    }
    net.shed_cost = number_or(root, "shed_cost", "case", default_shed_cost);
    return net;
}

// --- CSV bundle ------------------------------------------------------------

struct Section {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<long> line_numbers;
};

std::unordered_map<std::string, Section> read_sections(std::istream& in) {
    std::unordered_map<std::string, Section> sections;
    Section* current = nullptr;
    std::string line;
    long line_no = 0;
    while (csv::next_record(in, line, line_no)) {
        const auto t = csv::trim(line);
        if (t.front() == '[') {
            if (t.back() != ']') throw DataError("case line " + std::to_string(line_no) + ": malformed section tag");
            const std::string name(t.substr(1, t.size() - 2));
            if (sections.count(name)) throw DataError("case: duplicate section [" + name + "]");
            current = &sections[name];
            continue;
        }
        if (!current) throw DataError("case line " + std::to_string(line_no) + ": data before first section");
        std::vector<std::string> cells;
        for (auto c : csv::split(t)) cells.emplace_back(c);
        if (current->header.empty()) {
            current->header = std::move(cells);
        } else {
            if (cells.size() != current->header.size())
                throw DataError("case line " + std::to_string(line_no) + ": expected " +
                                std::to_string(current->header.size()) + " fields, found " +
                                std::to_string(cells.size()));
            current->rows.push_back(std::move(cells));
            current->line_numbers.push_back(line_no);
        }
    }
    return sections;
}

class SectionReader {
public:
    SectionReader(const Section& s, const char* what) : s_(s), what_(what) {}

    std::size_t size() const { return s_.rows.size(); }

    const std::string* cell(std::size_t row, const char* column) const {
        for (std::size_t c = 0; c < s_.header.size(); ++c)
            if (s_.header[c] == column) return &s_.rows[row][c];
        return nullptr;
    }
    std::string entity(std::size_t row) const {
        const std::string* id = cell(row, "id");
        return std::string(what_) + " " + (id ? *id : "#" + std::to_string(row));
    }
    const std::string& required(std::size_t row, const char* column) const {
        const std::string* v = cell(row, column);
        if (!v) throw DataError(entity(row) + ": missing field '" + column + "'");
        return *v;
    }
    double number(std::size_t row, const char* column) const {
        return csv::to_double(required(row, column), entity(row) + " field '" + column + "'");
    }
    double number_or(std::size_t row, const char* column, double fallback) const {
        return cell(row, column) ? number(row, column) : fallback;
    }
    int integer(std::size_t row, const char* column) const {
        return static_cast<int>(csv::to_int(required(row, column), entity(row) + " field '" + column + "'"));
    }

private:
    const Section& s_;
    const char* what_;
};

Network parse_csv_bundle(std::istream& in) {
    auto sections = read_sections(in);
    auto get = [&](const char* name) -> const Section& {
        auto it = sections.find(name);
        if (it == sections.end()) throw DataError(std::string("case: missing section [") + name + "]");
        return it->second;
    };
    Network net;
    {
        SectionReader r(get("buses"), "bus");
        for (std::size_t i = 0; i < r.size(); ++i) {
            const int id = r.integer(i, "id");
            const std::string* name = r.cell(i, "name");
            const std::string* region = r.cell(i, "region");
            net.buses.push_back({id, name ? *name : "bus" + std::to_string(id), region ? *region : ""});
        }
    }
    {
        SectionReader r(get("lines"), "line");
        for (std::size_t i = 0; i < r.size(); ++i)
            net.lines.push_back({r.integer(i, "id"), r.integer(i, "from_bus"), r.integer(i, "to_bus"),
                                 r.number(i, "susceptance"), r.number(i, "flow_limit")});
    }
    {
        SectionReader r(get("generators"), "generator");
        for (std::size_t i = 0; i < r.size(); ++i) {
            std::optional<bool> vre;
            if (const std::string* v = r.cell(i, "is_vre")) {
                if (*v == "true" || *v == "1") vre = true;
                else if (*v == "false" || *v == "0") vre = false;
                else throw DataError(r.entity(i) + ": field 'is_vre' must be true or false");
            }
            net.generators.push_back(generator_from(r.entity(i), r.integer(i, "id"), r.integer(i, "bus"),
                                                    r.number_or(i, "p_min", 0.0), r.number(i, "p_max"),
                                                    r.number(i, "marginal_cost"), r.number(i, "emission_rate"),
                                                    parse_gen_kind(r.required(i, "kind")), vre));
        }
    }
    {
        SectionReader r(get("loads"), "load");
        for (std::size_t i = 0; i < r.size(); ++i)
            net.loads.push_back({r.integer(i, "id"), r.integer(i, "bus"), r.number(i, "base_demand")});
    }
    if (auto it = sections.find("meta"); it != sections.end()) {
        SectionReader r(it->second, "meta");
        if (r.size() > 0) net.shed_cost = r.number_or(0, "shed_cost", default_shed_cost);
    }
    return net;
}

}  // namespace

namespace {

void check_network(const Network& net, const SourceIds& src) {
    const int nb = net.num_buses();
    if (nb == 0) throw DataError("case: no buses");
    auto name = [](const char* what, const std::vector<int>& ids, int i) {
        return std::string(what) + " " + std::to_string(ids[i]);
    };
    for (int i = 0; i < net.num_lines(); ++i) {
        const auto& l = net.lines[i];
        const std::string e = name("line", src.line, i);
        if (l.from_bus == l.to_bus) throw DataError(e + ": from_bus equals to_bus");
        if (!(l.susceptance > 0.0) || !std::isfinite(l.susceptance))
            throw DataError(e + ": susceptance must be positive and finite");
        if (!(l.flow_limit > 0.0)) throw DataError(e + ": flow_limit must be positive");
    }
    for (int i = 0; i < net.num_generators(); ++i) {
        const auto& g = net.generators[i];
        const std::string e = name("generator", src.gen, i);
        if (!std::isfinite(g.p_min) || !std::isfinite(g.p_max) || g.p_min < 0.0 || g.p_min > g.p_max)
            throw DataError(e + ": requires 0 <= p_min <= p_max");
        if (!std::isfinite(g.marginal_cost)) throw DataError(e + ": marginal_cost must be finite");
        if (!std::isfinite(g.emission_rate) || g.emission_rate < 0.0)
            throw DataError(e + ": emission_rate must be non-negative");
        if (is_zero_carbon(g.kind) && g.emission_rate != 0.0)
            throw DataError(e + ": " + to_string(g.kind) + " units must have zero emission_rate");
        if (g.is_vre != is_variable_renewable(g.kind))
            throw DataError(e + ": is_vre must be true exactly for wind and solar units");
        if (!(net.shed_cost > g.marginal_cost)) throw DataError(e + ": marginal_cost must be below shed_cost");
    }
    for (int i = 0; i < net.num_loads(); ++i) {
        const auto& d = net.loads[i];
        if (!std::isfinite(d.base_demand) || d.base_demand < 0.0)
            throw DataError(name("load", src.load, i) + ": base_demand must be non-negative");
    }
    if (!std::isfinite(net.shed_cost)) throw DataError("case: shed_cost must be finite");

    std::vector<int> parent(nb);
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& l : net.lines) parent[find_root(parent, l.from_bus)] = find_root(parent, l.to_bus);
    const int root = find_root(parent, 0);
    for (int i = 1; i < nb; ++i)
        if (find_root(parent, i) != root) throw DataError(name("bus", src.bus, i) + ": network is disconnected");
}

}  // namespace

void Network::validate() const {
    auto contiguous = [](const auto& items, const char* what) {
        for (std::size_t i = 0; i < items.size(); ++i)
            if (items[i].id != static_cast<int>(i))
                throw DataError(std::string(what) + " " + std::to_string(items[i].id) + ": ids must be contiguous");
    };
    contiguous(buses, "bus");
    contiguous(lines, "line");
    contiguous(generators, "generator");
    contiguous(loads, "load");
    auto check_bus = [&](int bus, const std::string& entity) {
        if (bus < 0 || bus >= num_buses()) throw DataError(entity + " references missing bus " + std::to_string(bus));
    };
    for (const auto& l : lines) {
        check_bus(l.from_bus, "line " + std::to_string(l.id));
        check_bus(l.to_bus, "line " + std::to_string(l.id));
    }
    for (const auto& g : generators) check_bus(g.bus, "generator " + std::to_string(g.id));
    for (const auto& d : loads) check_bus(d.bus, "load " + std::to_string(d.id));
    check_network(*this, {ids_of(buses), ids_of(lines), ids_of(generators), ids_of(loads)});
}

Network parse_case(std::istream& source, CaseFormat format) {
    auto [net, src] = reindex(format == CaseFormat::json ? parse_json(source) : parse_csv_bundle(source));
    check_network(net, src);
    return net;
}

Network read_case_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open case file '" + path + "'");
    const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return parse_case(in, is_json ? CaseFormat::json : CaseFormat::csv_bundle);
}

void write_case_json(std::ostream& out, const Network& net) {
    nlohmann::ordered_json root;
    auto& buses = root["buses"] = nlohmann::ordered_json::array();
    for (const auto& b : net.buses) buses.push_back({{"id", b.id}, {"name", b.name}, {"region", b.region}});
    auto& lines = root["lines"] = nlohmann::ordered_json::array();
    for (const auto& l : net.lines)
        lines.push_back({{"id", l.id},
                         {"from_bus", l.from_bus},
                         {"to_bus", l.to_bus},
                         {"susceptance", l.susceptance},
                         {"flow_limit", l.flow_limit}});
    auto& gens = root["generators"] = nlohmann::ordered_json::array();
    for (const auto& g : net.generators)
        gens.push_back({{"id", g.id},
                        {"bus", g.bus},
                        {"p_min", g.p_min},
                        {"p_max", g.p_max},
                        {"marginal_cost", g.marginal_cost},
                        {"emission_rate", g.emission_rate},
                        {"kind", to_string(g.kind)},
                        {"is_vre", g.is_vre}});
    auto& loads = root["loads"] = nlohmann::ordered_json::array();
    for (const auto& d : net.loads) loads.push_back({{"id", d.id}, {"bus", d.bus}, {"base_demand", d.base_demand}});
    root["shed_cost"] = net.shed_cost;
    out << root.dump(1) << '\n';
}

void write_case_csv_bundle(std::ostream& out, const Network& net) {
    out << "[buses]\nid,name,region\n";
    for (const auto& b : net.buses) out << b.id << ',' << b.name << ',' << b.region << '\n';
    out << "[lines]\nid,from_bus,to_bus,susceptance,flow_limit\n";
    for (const auto& l : net.lines)
        out << l.id << ',' << l.from_bus << ',' << l.to_bus << ',' << fmt(l.susceptance) << ',' << fmt(l.flow_limit)
            << '\n';
    out << "[generators]\nid,bus,p_min,p_max,marginal_cost,emission_rate,kind,is_vre\n";
    for (const auto& g : net.generators)
        out << g.id << ',' << g.bus << ',' << fmt(g.p_min) << ',' << fmt(g.p_max) << ',' << fmt(g.marginal_cost)
            << ',' << fmt(g.emission_rate) << ',' << to_string(g.kind) << ',' << (g.is_vre ? "true" : "false")
            << '\n';
    out << "[loads]\nid,bus,base_demand\n";
    for (const auto& d : net.loads) out << d.id << ',' << d.bus << ',' << fmt(d.base_demand) << '\n';
    out << "[meta]\nshed_cost\n" << fmt(net.shed_cost) << '\n';
}

HourScenario unit_scenario(const Network& net, int hour_index) {
    HourScenario s;
    s.hour_index = hour_index;
    for (const auto& d : net.loads) s.load_scale[d.id] = 1.0;
    for (const auto& g : net.generators)
        if (g.is_vre) s.vre_capacity_factor[g.id] = 1.0;
    return s;
}

HourCase apply_scenario(std::shared_ptr<const Network> network, const HourScenario& scenario) {
    const Network& net = *network;
    HourCase hc;
    hc.hour_index = scenario.hour_index;
    hc.effective_demand = Eigen::VectorXd::Zero(net.num_buses());
    hc.load_demand = Eigen::VectorXd::Zero(net.num_loads());
    hc.injection = Eigen::VectorXd::Zero(net.num_buses());
    for (const auto& d : net.loads) {
        auto it = scenario.load_scale.find(d.id);
        if (it == scenario.load_scale.end())
            throw DataError("hour " + std::to_string(scenario.hour_index) + ": missing load_scale for load " +
                            std::to_string(d.id));
        if (!std::isfinite(it->second) || it->second < 0.0)
            throw DataError("hour " + std::to_string(scenario.hour_index) + ": invalid load_scale for load " +
                            std::to_string(d.id));
        hc.load_demand(d.id) = d.base_demand * it->second;
        hc.effective_demand(d.bus) += hc.load_demand(d.id);
    }
    hc.effective_pmin.resize(net.num_generators());
    hc.effective_pmax.resize(net.num_generators());
    for (const auto& g : net.generators) {
        double cap = g.p_max;
        if (g.is_vre) {
            auto it = scenario.vre_capacity_factor.find(g.id);
            if (it == scenario.vre_capacity_factor.end())
                throw DataError("hour " + std::to_string(scenario.hour_index) +
                                ": missing capacity factor for generator " + std::to_string(g.id));
            if (!(it->second >= 0.0 && it->second <= 1.0))
                throw DataError("hour " + std::to_string(scenario.hour_index) +
                                ": capacity factor outside [0,1] for generator " + std::to_string(g.id));
            cap = g.p_max * it->second;
        }
        hc.effective_pmax(g.id) = cap;
        hc.effective_pmin(g.id) = std::min(g.p_min, cap);
    }
    hc.network = std::move(network);
    return hc;
}

HourCase with_extra_demand(const HourCase& hc, int bus, double mw) {
    HourCase out = hc;
    out.effective_demand(bus) += mw;
    return out;
}

HourCase with_extra_injection(const HourCase& hc, int bus, double mw) {
    HourCase out = hc;
    out.injection(bus) += mw;
    return out;
}

std::vector<HourScenario> load_scenario_series(std::istream& source, const Network* net) {
    std::string line;
    long line_no = 0;
    if (!csv::next_record(source, line, line_no)) throw DataError("scenario: empty file");
    const auto header = csv::split(line);
    if (header.empty() || header[0] != "hour") throw DataError("scenario: first column must be 'hour'");

    enum class Col { load, vre };
    struct Column {
        Col kind;
        int id;
        std::string name;
    };
    std::vector<Column> cols;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string name(header[c]);
        Col kind;
        std::string_view rest;
        if (name.rfind("load_", 0) == 0) { kind = Col::load; rest = std::string_view(name).substr(5); }
        else if (name.rfind("vre_", 0) == 0) { kind = Col::vre; rest = std::string_view(name).substr(4); }
        else throw DataError("scenario: unknown column '" + name + "'");
        const int id = static_cast<int>(csv::to_int(rest, "scenario column '" + name + "'"));
        if (net) {
            if (kind == Col::load && (id < 0 || id >= net->num_loads()))
                throw DataError("scenario: column '" + name + "' references missing load");
            if (kind == Col::vre && (id < 0 || id >= net->num_generators() || !net->generators[id].is_vre))
                throw DataError("scenario: column '" + name + "' does not reference a VRE generator");
        }
        cols.push_back({kind, id, name});
    }
    if (net) {
        std::vector<char> seen_load(net->num_loads(), 0), seen_gen(net->num_generators(), 0);
        for (const auto& c : cols) (c.kind == Col::load ? seen_load : seen_gen)[c.id] = 1;
        for (const auto& d : net->loads)
            if (!seen_load[d.id]) throw DataError("scenario: no column for load " + std::to_string(d.id));
        for (const auto& g : net->generators)
            if (g.is_vre && !seen_gen[g.id])
                throw DataError("scenario: no column for VRE generator " + std::to_string(g.id));
    }

    std::vector<HourScenario> out;
    while (csv::next_record(source, line, line_no)) {
        const auto cells = csv::split(line);
        const std::string where = "scenario line " + std::to_string(line_no);
        if (cells.size() != header.size())
            throw DataError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(cells.size()));
        HourScenario s;
        s.hour_index = static_cast<int>(csv::to_int(cells[0], where + " column 'hour'"));
        if (!out.empty() && s.hour_index != out.back().hour_index + 1) {
            if (s.hour_index <= out.back().hour_index)
                throw DataError(where + ": duplicate or out-of-order hour " + std::to_string(s.hour_index));
            throw DataError(where + ": gap before hour " + std::to_string(s.hour_index));
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double v = csv::to_double(cells[c + 1], where + " column '" + cols[c].name + "'");
            if (cols[c].kind == Col::load) {
                if (v < 0.0) throw DataError(where + " column '" + cols[c].name + "': negative load scale");
                s.load_scale[cols[c].id] = v;
            } else {
                if (v < 0.0 || v > 1.0)
                    throw DataError(where + " column '" + cols[c].name + "': capacity factor " + fmt(v) +
                                    " outside [0,1]");
                s.vre_capacity_factor[cols[c].id] = v;
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<HourScenario> read_scenario_file(const std::string& path, const Network* net) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    return load_scenario_series(in, net);
}

void write_scenario_series(std::ostream& out, const Network& net, const std::vector<HourScenario>& series) {
    out << "hour";
    for (const auto& d : net.loads) out << ",load_" << d.id;
    for (const auto& g : net.generators)
        if (g.is_vre) out << ",vre_" << g.id;
    out << '\n';
    for (const auto& s : series) {
        out << s.hour_index;
        for (const auto& d : net.loads) out << ',' << fmt(s.load_scale.at(d.id));
        for (const auto& g : net.generators)
            if (g.is_vre) out << ',' << fmt(s.vre_capacity_factor.at(g.id));
        out << '\n';
    }
}

}  // namespace lmesim
