#include "lmesim/accounting.hpp"
#include "lmesim/errors.hpp"
#include "lmesim/synthetic.hpp"

#include "helpers.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sstream>

using namespace lmesim;
using namespace lmesim::testing;

namespace {

SensitivityConfig exhaustive() {
    SensitivityConfig c;
    c.sample_rate = 1.0;
    return c;
}

CarbonAccounts solve_hour(const HourCase& hc, const SensitivityConfig& cfg = exhaustive()) {
    const auto r = lexicographic_dispatch(hc);
    return hour_accounts(r, compute_sensitivities(hc, r, cfg), hc);
}

CarbonAccounts fake_hour(int hour, double scope1, double shed) {
    CarbonAccounts a;
    a.hour = hour;
    a.load_account = Eigen::VectorXd::Constant(2, scope1 / 2);
    a.gen_account = Eigen::VectorXd::Zero(3);
    a.line_account = Eigen::VectorXd::Zero(1);
    a.scope1 = scope1;
    a.shed_mwh = shed;
    a.hours_included = 1;
    return a;
}

}  // namespace

TEST_CASE("single bus closed form") {
    const auto a = solve_hour(single_bus({{GenKind::gas, 40.0, 450.0, 100.0}}, 60.0));
    CHECK(a.load_account(0) == doctest::Approx(27000.0).epsilon(1e-8));
    CHECK(std::abs(a.gen_account(0)) <= 1e-3);
    CHECK(a.scope1 == doctest::Approx(27000.0).epsilon(1e-8));
    CHECK(balanced(a));
    CHECK(balance_residual(a) == doctest::Approx(a.residual));
}

TEST_CASE("zero demand hour") {
    const auto a = solve_hour(single_bus({{GenKind::gas, 40.0, 450.0, 100.0}}, 0.0));
    CHECK(a.load_account.cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.gen_account.cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.scope1 == 0.0);
    CHECK(a.residual == 0.0);
}

TEST_CASE("fixtures balance") {
    for (const char* name : {"threebus.json", "fivebus.json"}) {
        CAPTURE(name);
        const auto a = solve_hour(base_hour(name));
        CHECK(!a.degenerate);
        CHECK(balanced(a));
        CHECK(a.line_account.cwiseAbs().maxCoeff() > 0.0);  // both are congested
    }
    // threebus by hand: LME (800, 450, 100), line 0-2 SCI 1050 at 60 MW
    const auto a = solve_hour(base_hour("threebus.json"));
    CHECK(a.load_account(0) == doctest::Approx(12000.0).epsilon(1e-6));
    CHECK(a.line_account(2) == doctest::Approx(63000.0).epsilon(1e-6));
    CHECK(a.gen_account(0) == doctest::Approx(-32000.0).epsilon(1e-6));
}

TEST_CASE("accounts balance with shedding and fixed injections") {
    SUBCASE("partial shed behind a line") {
        const Network net = make_network(2, {{0, 0, 1, 100.0, 30.0}},
                                         {{0, {GenKind::coal, 20.0, 800.0, 200.0}}, {1, {GenKind::gas, 40.0, 450.0, 40.0}}},
                                         {{1, 100.0}, {0, 10.0}});
        const auto a = solve_hour(hour_of(net));
        CHECK(a.shed_mwh == doctest::Approx(30.0));
        CHECK(balanced(a));
    }
    SUBCASE("injection") {
        HourCase hc = base_hour("fivebus.json");
        hc = with_extra_injection(hc, 2, 35.0);
        const auto a = solve_hour(hc);
        CHECK(a.injection_account != 0.0);
        CHECK(balanced(a));
    }
}

TEST_CASE("accounts balance on random synthetic cases") {
    int hours = 0, degenerate = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        SyntheticParams sp;
        sp.buses = 10 + static_cast<int>(seed * 3);
        sp.lines = sp.buses + 5;
        sp.generators = 10;
        sp.hours = 8;
        sp.seed = seed * 1000 + 1;
        const auto sc = generate_synthetic(sp);
        auto net = std::make_shared<const Network>(sc.network);
        for (const auto& s : sc.scenarios) {
            const auto a = solve_hour(apply_scenario(net, s));
            ++hours;
            if (a.degenerate) {
                ++degenerate;
                continue;
            }
            CHECK(balanced(a));
        }
    }
    MESSAGE("degenerate hours " << degenerate << "/" << hours);
}

TEST_CASE("zero-carbon generators carry non-positive accounts where LME >= 0") {
    SyntheticParams sp;
    sp.buses = 15;
    sp.lines = 20;
    sp.hours = 12;
    sp.seed = 44;
    const auto sc = generate_synthetic(sp);
    auto net = std::make_shared<const Network>(sc.network);
    for (const auto& s : sc.scenarios) {
        const HourCase hc = apply_scenario(net, s);
        const auto r = lexicographic_dispatch(hc);
        const auto rec = compute_sensitivities(hc, r, {});
        const auto a = hour_accounts(r, rec, hc);
        for (const auto& g : net->generators)
            if (is_zero_carbon(g.kind) && rec.lme(g.bus) >= 0.0) CHECK(a.gen_account(g.id) <= 1e-9);
    }
}

TEST_CASE("degenerate hour goes to the ledger") {
    AccountAggregator agg;
    agg.add(solve_hour(single_bus({{GenKind::coal, 20.0, 800.0, 100.0}, {GenKind::gas, 20.0, 450.0, 50.0}}, 50.0)));
    REQUIRE(agg.summary().ledger.size() == 1);
    CHECK(agg.summary().ledger[0].degenerate);
    CHECK(agg.summary().totals.hours_included == 1);
}

TEST_CASE("aggregation and the shed filter") {
    SUBCASE("plain sum") {
        std::vector<CarbonAccounts> hs{fake_hour(0, 10.0, 0.0), fake_hour(1, 20.0, 99.0), fake_hour(2, 30.0, 100.0)};
        const auto t = aggregate_accounts(hs, {0.0, 99.0, 100.0});
        CHECK(t.scope1 == 60.0);
        CHECK(t.load_total() == 60.0);
        CHECK(t.hours_included == 3);
        CHECK(t.hours_filtered == 0);
    }
    SUBCASE("hour over threshold is excluded") {
        std::vector<CarbonAccounts> hs{fake_hour(0, 10.0, 0.0), fake_hour(1, 20.0, 150.0), fake_hour(2, 30.0, 5.0)};
        const auto t = aggregate_accounts(hs, {0.0, 150.0, 5.0});
        CHECK(t.scope1 == 40.0);
        CHECK(t.hours_filtered == 1);
        CHECK(t.hours_included == 2);
        AccountAggregator agg;
        for (const auto& h : hs) agg.add(h);
        CHECK(agg.summary().filtered_hours == std::vector<int>{1});
    }
    SUBCASE("length mismatch") { CHECK_THROWS_AS(aggregate_accounts({fake_hour(0, 1, 0)}, {}), DataError); }
}

TEST_CASE("grouping partitions the totals") {
    SyntheticParams sp;
    sp.buses = 12;
    sp.lines = 16;
    sp.generators = 10;
    sp.mix = {{GenKind::coal, 0.3}, {GenKind::gas, 0.4}, {GenKind::wind, 0.3}};
    sp.hours = 6;
    const auto sc = generate_synthetic(sp);
    auto net = std::make_shared<const Network>(sc.network);
    AccountAggregator agg;
    for (const auto& s : sc.scenarios) agg.add(solve_hour(apply_scenario(net, s), {}));
    const auto& t = agg.summary().totals;
    const auto kinds = gen_accounts_by_kind(t, *net);
    CHECK(kinds.size() == 3);
    double kind_sum = 0.0;
    for (auto [k, v] : kinds) kind_sum += v;
    CHECK(kind_sum == doctest::Approx(t.gen_total()).epsilon(1e-12));
    double load = 0.0, gen = 0.0, line = 0.0;
    for (const auto& [r, g] : accounts_by_region(t, *net)) {
        load += g.load;
        gen += g.gen;
        line += g.line;
    }
    CHECK(load == doctest::Approx(t.load_total()).epsilon(1e-12));
    CHECK(gen == doctest::Approx(t.gen_total()).epsilon(1e-12));
    CHECK(line == doctest::Approx(t.line_total()).epsilon(1e-12));
}

TEST_CASE("report and dumps") {
    const Network net = load_fixture("threebus.json");
    AccountAggregator agg;
    const auto a = solve_hour(base_hour("threebus.json"));
    agg.add(a);
    std::ostringstream js;
    write_accounts_report(js, agg.summary(), net);
    const auto j = nlohmann::json::parse(js.str());
    CHECK(j["hours_included"] == 1);
    CHECK(j["totals_kg"]["scope1"].get<double>() == doctest::Approx(a.scope1));
    CHECK(j["totals_mmt"]["scope1"].get<double>() == doctest::Approx(a.scope1 * 1e-9));
    CHECK(j["by_region_kg"].contains("A"));
    CHECK(j["generation_by_kind_kg"].contains("wind"));

    std::ostringstream cs, hs;
    write_entity_accounts(cs, agg.summary().totals, net);
    CHECK(cs.str().find("generator,1,A,coal,") != std::string::npos);
    write_hourly_accounts_header(hs);
    write_hourly_accounts_rows(hs, a);
    CHECK(hs.str().find("0,line,2,63000") != std::string::npos);
}
