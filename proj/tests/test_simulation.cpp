#include "lmesim/errors.hpp"
#include "lmesim/simulation.hpp"
#include "lmesim/synthetic.hpp"

#include "helpers.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lmesim;
using namespace lmesim::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lmesim_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Data rows (no comment or header lines) split into cells.
std::vector<std::vector<std::string>> rows_of(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::vector<std::vector<std::string>> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}

SyntheticCase small_synthetic(int hours) {
    SyntheticParams p;
    p.buses = 12;
    p.lines = 16;
    p.generators = 8;
    p.hours = hours;
    p.seed = 11;
    return generate_synthetic(p);
}

}  // namespace

TEST_CASE("threebus day writes every file") {
    auto net = std::make_shared<const Network>(load_fixture("threebus.json"));
    std::vector<HourScenario> hours;
    for (int h = 0; h < 24; ++h) hours.push_back(unit_scenario(*net, h));
    const auto dir = scratch("threebus");
    SimulationConfig cfg;
    cfg.out_dir = dir.string();
    cfg.sensitivity.sample_rate = 1.0;
    const auto s = simulate(net, hours, cfg);

    CHECK(s.hours == 24);
    CHECK(s.errors.empty());
    CHECK(s.max_abs_residual <= 1e-6 * std::max(s.scope1_all_hours / 24, 1.0));
    CHECK(rows_of(dir / files::hourly_summary).size() == 24);
    CHECK(rows_of(dir / files::bus_sensitivity).size() == 24 * 3);
    CHECK(rows_of(dir / files::line_sensitivity).size() == 24 * net->num_lines());
    const std::size_t per_hour = net->num_generators() + 2 * net->num_buses() + net->num_lines() + 2;
    CHECK(rows_of(dir / files::dispatch).size() == 24 * per_hour);
    CHECK_FALSE(fs::exists(dir / files::errors));
    CHECK(fs::exists(dir / files::accounts));
    CHECK(fs::exists(dir / files::entity_accounts));

    const auto j = nlohmann::json::parse(slurp(dir / files::summary));
    CHECK(j["schema"] == "lmesim.summary v1");
    CHECK(j["hours"] == 24);
    CHECK(j["errors"].empty());
    CHECK(j["case"]["buses"] == 3);
}

TEST_CASE("summary totals equal the hourly columns") {
    const auto sc = small_synthetic(36);
    auto net = std::make_shared<const Network>(sc.network);
    const auto dir = scratch("totals");
    SimulationConfig cfg;
    cfg.out_dir = dir.string();
    const auto s = simulate(net, sc.scenarios, cfg);

    double scope1 = 0, cost = 0, load = 0, gen = 0, line = 0, inj = 0;
    int included = 0;
    for (const auto& r : rows_of(dir / files::hourly_summary)) {
        REQUIRE(r.size() == 11);
        scope1 += std::stod(r[1]);
        cost += std::stod(r[2]);
        if (r[10] == "0") {
            ++included;
            load += std::stod(r[4]);
            gen += std::stod(r[5]);
            line += std::stod(r[6]);
            inj += std::stod(r[7]);
        }
    }
    const auto& t = s.accounts.totals;
    CHECK(scope1 == doctest::Approx(s.scope1_all_hours).epsilon(1e-12));
    CHECK(cost == doctest::Approx(s.cost_all_hours).epsilon(1e-12));
    CHECK(included == t.hours_included);
    CHECK(load == doctest::Approx(t.load_total()).epsilon(1e-12));
    CHECK(gen == doctest::Approx(t.gen_total()).epsilon(1e-9).scale(1.0));
    CHECK(line == doctest::Approx(t.line_total()).epsilon(1e-12).scale(1.0));
    CHECK(inj == doctest::Approx(t.injection_account).scale(1.0));

    const auto j = nlohmann::json::parse(slurp(dir / files::summary));
    CHECK(j["scope1_kg_all_hours"].get<double>() == s.scope1_all_hours);
    CHECK(j["accounts_kg"]["load"].get<double>() == t.load_total());
}

TEST_CASE("outputs do not depend on the worker count") {
    const auto sc = small_synthetic(30);
    auto net = std::make_shared<const Network>(sc.network);
    std::vector<std::string> names = {files::dispatch,        files::bus_sensitivity, files::line_sensitivity,
                                      files::hourly_accounts, files::hourly_summary,  files::entity_accounts,
                                      files::accounts,        files::summary};
    std::vector<std::string> first;
    for (int workers : {1, 3, 8}) {
        const auto dir = scratch("workers" + std::to_string(workers));
        SimulationConfig cfg;
        cfg.out_dir = dir.string();
        cfg.workers = workers;
        cfg.sensitivity.sample_rate = 0.5;
        cfg.sensitivity.seed = 99;
        simulate(net, sc.scenarios, cfg);
        std::vector<std::string> got;
        for (const auto& n : names) got.push_back(slurp(dir / n));
        if (first.empty()) {
            first = got;
            continue;
        }
        for (std::size_t i = 0; i < names.size(); ++i) {
            INFO(names[i], " with ", workers, " workers");
            CHECK(got[i] == first[i]);
        }
    }
}

TEST_CASE("no output directory means no files") {
    auto net = std::make_shared<const Network>(load_fixture("threebus.json"));
    const auto s = simulate(net, {unit_scenario(*net, 0), unit_scenario(*net, 1)}, SimulationConfig{});
    CHECK(s.hours == 2);
    CHECK(s.accounts.totals.hours_included == 2);
}

TEST_CASE("failing hour stops the run and is ledgered") {
    auto net = std::make_shared<const Network>(load_fixture("threebus.json"));
    std::vector<HourScenario> hours;
    for (int h = 0; h < 12; ++h) hours.push_back(unit_scenario(*net, h));
    hours[5].load_scale[0] = -1.0;
    for (int workers : {1, 4}) {
        const auto dir = scratch("errors" + std::to_string(workers));
        SimulationConfig cfg;
        cfg.out_dir = dir.string();
        cfg.workers = workers;
        CHECK_THROWS_AS(simulate(net, hours, cfg), DataError);
        const auto errs = rows_of(dir / files::errors);
        REQUIRE(errs.size() == 1);
        CHECK(errs[0][0] == "5");
        CHECK(errs[0][1] == "data");
        const auto summary = rows_of(dir / files::hourly_summary);
        CHECK(summary.size() == 5);
        const auto j = nlohmann::json::parse(slurp(dir / files::summary));
        CHECK(j["errors"].size() == 1);
        CHECK(j["errors"][0]["hour"] == 5);
    }
}

TEST_CASE("over-threshold shed hour is filtered") {
    // One bus, 100 MW of capacity; hour 1 asks for 250 MW.
    const Network base = make_network(1, {}, {{0, {GenKind::gas, 40.0, 450.0, 100.0}}}, {{0, 80.0}});
    auto net = std::make_shared<const Network>(base);
    std::vector<HourScenario> hours = {unit_scenario(*net, 0), unit_scenario(*net, 1), unit_scenario(*net, 2)};
    hours[1].load_scale[0] = 250.0 / 80.0;
    hours[2].load_scale[0] = 190.0 / 80.0;
    const auto dir = scratch("shed");
    SimulationConfig cfg;
    cfg.out_dir = dir.string();
    const auto s = simulate(net, hours, cfg);
    CHECK(s.accounts.filtered_hours == std::vector<int>{1});
    CHECK(s.accounts.totals.hours_included == 2);
    CHECK(s.shed_all_hours == doctest::Approx(240.0));
    std::ifstream in(dir / files::hourly_summary);
    CHECK(read_filtered_hours(in) == std::vector<int>{1});
}

TEST_CASE("read_filtered_hours") {
    std::istringstream ok("# schema: x\nhour,filtered,scope1_kg\n0,0,1\n7,1,2\n9,1,3\n");
    CHECK(read_filtered_hours(ok) == std::vector<int>{7, 9});
    std::istringstream missing("hour,scope1_kg\n0,1\n");
    CHECK_THROWS_AS(read_filtered_hours(missing), DataError);
    std::istringstream ragged("hour,filtered\n0\n");
    CHECK_THROWS_AS(read_filtered_hours(ragged), DataError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_filtered_hours(empty), DataError);
}

TEST_CASE("bad simulation settings") {
    auto net = std::make_shared<const Network>(load_fixture("threebus.json"));
    SimulationConfig cfg;
    cfg.workers = 0;
    CHECK_THROWS_AS(simulate(net, {unit_scenario(*net)}, cfg), ConfigError);
    cfg.workers = 1;
    cfg.shed_filter_mwh = -1;
    CHECK_THROWS_AS(simulate(net, {unit_scenario(*net)}, cfg), ConfigError);
}

TEST_CASE("default worker count") {
    ::unsetenv("LMESIM_WORKERS");
    CHECK(default_workers() == 1);
    ::setenv("LMESIM_WORKERS", "6", 1);
    CHECK(default_workers() == 6);
    ::setenv("LMESIM_WORKERS", "zero", 1);
    CHECK(default_workers() == 1);
    ::setenv("LMESIM_WORKERS", "-2", 1);
    CHECK(default_workers() == 1);
    ::unsetenv("LMESIM_WORKERS");
}
