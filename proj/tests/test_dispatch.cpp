#include "lmesim/dispatch.hpp"
#include "lmesim/errors.hpp"
#include "lmesim/synthetic.hpp"

#include "helpers.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace lmesim;
using namespace lmesim::testing;

namespace {

nlohmann::json dispatch_oracle() {
    std::ifstream in(data_dir() + "/dispatch_oracle.json");
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

void check_vector(const Eigen::VectorXd& v, const nlohmann::json& expected, double tol) {
    REQUIRE(v.size() == static_cast<Eigen::Index>(expected.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) CHECK(std::abs(v(i) - expected[i].get<double>()) <= tol);
}

void check_contract(const HourCase& hc, const TwoTierResult& r, const DispatchOptions& opt = {}) {
    const Network& net = hc.net();
    const double tol = 1e-6;
    for (const StageResult* st : {&r.stage1, &r.stage2}) {
        const auto& d = st->dispatch;
        Eigen::VectorXd net_in = -hc.effective_demand + hc.injection + d.shed;
        for (const auto& g : net.generators) net_in(g.bus) += d.generation(g.id);
        for (const auto& l : net.lines) {
            net_in(l.from_bus) -= d.flow(l.id);
            net_in(l.to_bus) += d.flow(l.id);
            CHECK(std::abs(d.flow(l.id) - l.susceptance * (d.angle(l.from_bus) - d.angle(l.to_bus))) <= tol);
            CHECK(std::abs(d.flow(l.id)) <= l.flow_limit + tol);
        }
        CHECK(net_in.cwiseAbs().maxCoeff() <= tol);
        CHECK(d.angle(0) == 0.0);
        double e = 0.0;
        for (const auto& g : net.generators) {
            CHECK(d.generation(g.id) >= hc.effective_pmin(g.id) - tol);
            CHECK(d.generation(g.id) <= hc.effective_pmax(g.id) + tol);
            e += g.emission_rate * d.generation(g.id);
        }
        CHECK(d.scope1_emissions == doctest::Approx(e));
        CHECK((d.shed.array() >= -tol).all());
        CHECK((d.shed - hc.effective_demand).maxCoeff() <= tol);
        CHECK(d.generation.sum() + d.shed.sum() + hc.injection.sum() ==
              doctest::Approx(hc.effective_demand.sum()).epsilon(1e-9).scale(1));
    }
    CHECK(r.stage2.dispatch.total_cost <= r.stage1.dispatch.total_cost * (1.0 + 10 * opt.cost_cap_tol) + 1e-6);
    CHECK(r.stage2.dispatch.scope1_emissions <= r.stage1.dispatch.scope1_emissions + 1e-6);
    CHECK(r.stage2.cost_cap_dual <= 1e-9);
}

}  // namespace

TEST_CASE("single bus, gas serves the load") {
    const HourCase hc = single_bus({{GenKind::gas, 40.0, 450.0, 100.0}}, 60.0);
    const auto r = lexicographic_dispatch(hc);
    CHECK(r.stage1.dispatch.generation(0) == doctest::Approx(60.0));
    CHECK(r.stage1.dispatch.total_cost == doctest::Approx(2400.0));
    CHECK(r.stage1.dispatch.shed(0) == doctest::Approx(0.0));
    CHECK(r.stage1.demand_dual(0) == doctest::Approx(40.0));
    // unique optimum: stage 2 keeps the dispatch
    CHECK(r.stage2.dispatch.generation(0) == doctest::Approx(60.0).epsilon(1e-6));
    check_contract(hc, r);
}

TEST_CASE("single bus, shortfall is shed at the shed price") {
    const HourCase hc = single_bus({{GenKind::gas, 40.0, 450.0, 100.0}}, 130.0);
    const auto r = lexicographic_dispatch(hc);
    CHECK(r.stage1.dispatch.shed(0) == doctest::Approx(30.0));
    CHECK(r.stage1.demand_dual(0) == doctest::Approx(10000.0));
    check_contract(hc, r);
}

TEST_CASE("tied coal and gas: emission tier picks gas") {
    const HourCase hc = single_bus({{GenKind::coal, 20.0, 800.0, 100.0}, {GenKind::gas, 20.0, 450.0, 100.0}}, 50.0);
    const auto r = lexicographic_dispatch(hc);
    CHECK(r.stage2.dispatch.generation(1) == doctest::Approx(50.0).epsilon(1e-6));
    CHECK(r.stage2.dispatch.scope1_emissions == doctest::Approx(22500.0).epsilon(1e-6));
    check_contract(hc, r);
}

TEST_CASE("fixtures match the HiGHS oracle") {
    const auto oracle = dispatch_oracle();
    for (const char* name : {"threebus.json", "fivebus.json"}) {
        CAPTURE(name);
        const auto& o = oracle[name];
        const HourCase hc = base_hour(name);
        const auto r = lexicographic_dispatch(hc);
        CHECK(r.stage1.dispatch.total_cost == doctest::Approx(o["stage1_cost"].get<double>()).epsilon(1e-9));
        check_vector(r.stage1.dispatch.generation, o["stage1"]["generation"], 1e-6);
        check_vector(r.stage1.dispatch.flow, o["stage1"]["flow"], 1e-6);
        check_vector(r.stage1.balance_dual, o["stage1_balance_dual"], 1e-6);
        CHECK(r.stage2.dispatch.scope1_emissions == doctest::Approx(o["stage2_emissions"].get<double>()).epsilon(1e-9));
        check_vector(r.stage2.dispatch.generation, o["stage2"]["generation"], 1e-6);
        check_vector(r.stage2.dispatch.flow, o["stage2"]["flow"], 1e-6);
        check_contract(hc, r);
    }
}

TEST_CASE("threebus hand solution") {
    const auto r = lexicographic_dispatch(base_hour("threebus.json"));
    const auto& d1 = r.stage1.dispatch;
    CHECK(d1.generation(0) == doctest::Approx(40.0));
    CHECK(d1.generation(1) == doctest::Approx(20.0));
    CHECK(d1.generation(2) == doctest::Approx(60.0));
    CHECK(d1.flow(2) == doctest::Approx(60.0));
    CHECK(r.stage1.demand_dual(0) == doctest::Approx(20.0));
    CHECK(r.stage1.demand_dual(1) == doctest::Approx(40.0));
    CHECK(r.stage1.demand_dual(2) == doctest::Approx(60.0));
    CHECK(r.stage2.dispatch.scope1_emissions <= d1.scope1_emissions);
}

TEST_CASE("without line limits every bus has the same price") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SyntheticParams sp;
        sp.buses = 12;
        sp.lines = 16;
        sp.generators = 9;
        sp.hours = 3;
        sp.seed = seed;
        auto sc = generate_synthetic(sp);
        for (auto& l : sc.network.lines) l.flow_limit = inf;
        auto net = std::make_shared<const Network>(sc.network);
        for (const auto& s : sc.scenarios) {
            const auto r = lexicographic_dispatch(apply_scenario(net, s));
            const auto& lmp = r.stage1.demand_dual;
            CHECK(lmp.maxCoeff() - lmp.minCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("dispatch contract holds on random synthetic cases") {
    for (std::uint64_t seed = 100; seed < 112; ++seed) {
        SyntheticParams sp;
        sp.buses = 10 + static_cast<int>(seed % 20);
        sp.lines = sp.buses + 4;
        sp.generators = 8;
        sp.hours = 6;
        sp.seed = seed;
        const auto sc = generate_synthetic(sp);
        auto net = std::make_shared<const Network>(sc.network);
        for (const auto& s : sc.scenarios) {
            const HourCase hc = apply_scenario(net, s);
            check_contract(hc, lexicographic_dispatch(hc));
        }
    }
}

TEST_CASE("24-hour series is deterministic") {
    auto net = std::make_shared<const Network>(load_fixture("threebus.json"));
    for (int h = 0; h < 24; ++h) {
        auto s = unit_scenario(*net, h);
        s.load_scale[0] = 0.5 + 0.05 * h;
        s.vre_capacity_factor[0] = (h % 7) / 6.0;
        const HourCase hc = apply_scenario(net, s);
        const auto a = lexicographic_dispatch(hc);
        const auto b = lexicographic_dispatch(hc);
        CHECK(a.hour_index == h);
        CHECK((a.stage2.dispatch.generation - b.stage2.dispatch.generation).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.stage1.demand_dual - b.stage1.demand_dual).cwiseAbs().maxCoeff() == 0.0);
        check_contract(hc, a);
    }
}

TEST_CASE("dispatch dump rows") {
    const auto r = lexicographic_dispatch(base_hour("threebus.json"));
    std::ostringstream os;
    write_dispatch_header(os);
    write_dispatch_rows(os, 7, r.dispatch());
    const std::string s = os.str();
    CHECK(s.find("# schema: lmesim.dispatch v1\nhour,entity_type,entity_id,value\n") == 0);
    CHECK(s.find("7,generation,0,40\n") != std::string::npos);
    CHECK(s.find("7,scope1_emissions,0,") != std::string::npos);
    // 3 gens + 3 angles + 3 flows + 3 sheds + 2 totals + 2 header lines
    CHECK(std::count(s.begin(), s.end(), '\n') == 16);
}

TEST_CASE("problem builders expose the formulation") {
    const HourCase hc = base_hour("threebus.json");
    const auto p1 = dispatch_problem(hc);
    CHECK(p1.num_variables() == 3 + 3 + 3 + 3);
    CHECK(p1.num_constraints() == 3 + 3);
    const auto p2 = emission_problem(hc, 2800.0);
    CHECK(p2.num_constraints() == 7);
    CHECK(p2.row(6).name == "cost_cap");
}
