#include "lmesim/lp.hpp"

#include <Eigen/LU>
#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <random>
#include <sstream>

using namespace lmesim;

namespace {

LinearProblem from_json(const nlohmann::json& c) {
    LinearProblem p;
    const auto& cost = c["c"];
    for (std::size_t j = 0; j < cost.size(); ++j) {
        const double lo = c["lower"][j].is_null() ? -inf : c["lower"][j].get<double>();
        const double hi = c["upper"][j].is_null() ? inf : c["upper"][j].get<double>();
        p.add_variable("x" + std::to_string(j), lo, hi, cost[j].get<double>());
    }
    for (std::size_t i = 0; i < c["a"].size(); ++i) {
        std::vector<LpTerm> terms;
        for (std::size_t j = 0; j < cost.size(); ++j)
            if (double v = c["a"][i][j]; v != 0.0) terms.push_back({static_cast<int>(j), v});
        const std::string r = c["rel"][i];
        const Relation rel = r == "<=" ? Relation::less_equal : r == ">=" ? Relation::greater_equal : Relation::equal;
        p.add_constraint(std::move(terms), rel, c["rhs"][i].get<double>());
    }
    return p;
}

nlohmann::json load_random_lps() {
    std::ifstream in(std::string(LMESIM_TEST_DATA) + "/random_lps.json");
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

// Brute-force oracle for tiny LPs with all-finite bounds and only <= rows:
// enumerate every choice of n active constraints (rows or bounds), solve the
// square system, and keep the best feasible vertex.
double enumerate_vertices(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi, const Eigen::VectorXd& c) {
    const int n = static_cast<int>(c.size());
    const int m = static_cast<int>(b.size());
    // stacked halfspaces g x <= h
    Eigen::MatrixXd g(m + 2 * n, n);
    Eigen::VectorXd h(m + 2 * n);
    g.topRows(m) = a;
    h.head(m) = b;
    for (int j = 0; j < n; ++j) {
        g.row(m + 2 * j) = -Eigen::RowVectorXd::Unit(n, j);
        h(m + 2 * j) = -lo(j);
        g.row(m + 2 * j + 1) = Eigen::RowVectorXd::Unit(n, j);
        h(m + 2 * j + 1) = hi(j);
    }
    const int k = static_cast<int>(h.size());
    double best = inf;
    std::vector<int> pick(n);
    for (int i = 0; i < n; ++i) pick[i] = i;
    while (true) {
        Eigen::MatrixXd sq(n, n);
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) {
            sq.row(i) = g.row(pick[i]);
            rhs(i) = h(pick[i]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sq);
        if (lu.isInvertible()) {
            const Eigen::VectorXd x = lu.solve(rhs);
            if (((g * x - h).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
        }
        int i = n - 1;
        while (i >= 0 && pick[i] == k - n + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (int r = i + 1; r < n; ++r) pick[r] = pick[r - 1] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("minimize x subject to x >= 3") {
    LinearProblem p;
    const int x = p.add_variable("x", -inf, inf, 1.0);
    const int c = p.add_constraint({{x, 1.0}}, Relation::greater_equal, 3.0);
    const auto s = solve(p);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.primal(x) == doctest::Approx(3.0));
    CHECK(s.dual(c) == doctest::Approx(1.0));
    CHECK(s.objective_value == doctest::Approx(3.0));
}

TEST_CASE("contradictory rows are infeasible") {
    LinearProblem p;
    const int x = p.add_variable("x", -inf, inf, 0.0);
    p.add_constraint({{x, 1.0}}, Relation::less_equal, 1.0);
    p.add_constraint({{x, 1.0}}, Relation::greater_equal, 2.0);
    CHECK(solve(p).status == LpStatus::infeasible);
}

TEST_CASE("unbounded ray is reported") {
    LinearProblem p;
    const int x = p.add_variable("x", 0.0, inf, -1.0);
    const int y = p.add_variable("y", 0.0, inf, 0.0);
    p.add_constraint({{x, 1.0}, {y, -1.0}}, Relation::less_equal, 1.0);
    CHECK(solve(p).status == LpStatus::unbounded);
}

TEST_CASE("no constraints: variables sit at their cheaper bound") {
    LinearProblem p;
    p.add_variable("a", -2.0, 5.0, 1.0);
    p.add_variable("b", -2.0, 5.0, -1.0);
    const auto s = solve(p);
    REQUIRE(s.optimal());
    CHECK(s.primal(0) == doctest::Approx(-2.0));
    CHECK(s.primal(1) == doctest::Approx(5.0));
    CHECK(s.upper_bound_dual(1) == doctest::Approx(-1.0));
    CHECK(s.lower_bound_dual(0) == doctest::Approx(1.0));
}

TEST_CASE("redundant equality rows are tolerated") {
    LinearProblem p;
    const int x = p.add_variable("x", 0.0, 10.0, 1.0);
    const int y = p.add_variable("y", 0.0, 10.0, 2.0);
    p.add_constraint({{x, 1.0}, {y, 1.0}}, Relation::equal, 4.0);
    p.add_constraint({{x, 2.0}, {y, 2.0}}, Relation::equal, 8.0);
    const auto s = solve(p);
    REQUIRE(s.optimal());
    CHECK(s.objective_value == doctest::Approx(4.0));
}

TEST_CASE("random 20x30 LPs match the HiGHS oracle") {
    const auto data = load_random_lps();
    REQUIRE(data["cases"].size() >= 10);
    for (const auto& c : data["cases"]) {
        const auto p = from_json(c);
        const auto s = solve(p);
        REQUIRE(s.status == LpStatus::optimal);
        CHECK(s.objective_value == doctest::Approx(c["objective"].get<double>()).epsilon(1e-8).scale(1.0));
        CHECK(s.primal_residual <= 1e-7);
        CHECK(s.duality_gap <= 1e-6);
        CHECK(s.complementarity <= 1e-6);
    }
}

TEST_CASE("long double tableau agrees with double") {
    const auto data = load_random_lps();
    for (const auto& c : data["cases"]) {
        const auto p = from_json(c);
        const auto sd = solve<double>(p);
        const auto sl = solve<long double>(p);
        REQUIRE(sd.optimal());
        REQUIRE(sl.optimal());
        CHECK(sd.objective_value == doctest::Approx(sl.objective_value).epsilon(1e-10));
    }
}

TEST_CASE("duals are the rhs sensitivity on non-degenerate LPs") {
    // Perturb the rhs of each binding row by +eps; the optimum must move by
    // dual * eps.  Cases where a perturbation changes the basis are skipped.
    const auto data = load_random_lps();
    const double eps = 1e-5;
    int checked = 0;
    for (const auto& c : data["cases"]) {
        auto p = from_json(c);
        const auto base = solve(p);
        REQUIRE(base.optimal());
        for (int i = 0; i < p.num_constraints(); ++i) {
            if (std::abs(base.dual(i)) < 1e-8) continue;
            const double rhs = p.row(i).rhs;
            p.set_rhs(i, rhs + eps);
            const auto up = solve(p);
            p.set_rhs(i, rhs - eps);
            const auto down = solve(p);
            p.set_rhs(i, rhs);
            REQUIRE(up.optimal());
            REQUIRE(down.optimal());
            const double fwd = (up.objective_value - base.objective_value) / eps;
            const double bwd = (base.objective_value - down.objective_value) / eps;
            if (std::abs(fwd - bwd) > 1e-4) continue;  // breakpoint, degenerate
            CHECK(fwd == doctest::Approx(base.dual(i)).epsilon(1e-4).scale(1.0));
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("duals match the oracle where HiGHS reports them") {
    const auto data = load_random_lps();
    int agree = 0, total = 0;
    for (const auto& c : data["cases"]) {
        const auto s = solve(from_json(c));
        REQUIRE(s.optimal());
        for (std::size_t i = 0; i < c["duals"].size(); ++i) {
            ++total;
            if (std::abs(s.dual(static_cast<int>(i)) - c["duals"][i].get<double>()) < 1e-6) ++agree;
        }
    }
    // Degenerate vertices admit several dual solutions; most rows still agree.
    CHECK(agree >= total * 9 / 10);
}

TEST_CASE("tiny LPs match vertex enumeration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3, m = 4;
        Eigen::MatrixXd a(m, n);
        Eigen::VectorXd b(m), lo(n), hi(n), c(n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = u(rng);
            b(i) = 1.0 + u(rng);
        }
        for (int j = 0; j < n; ++j) {
            lo(j) = -2.0 + 0.5 * u(rng);
            hi(j) = 2.0 + 0.5 * u(rng);
            c(j) = u(rng);
        }
        LinearProblem p;
        for (int j = 0; j < n; ++j) p.add_variable("x" + std::to_string(j), lo(j), hi(j), c(j));
        for (int i = 0; i < m; ++i) {
            std::vector<LpTerm> terms;
            for (int j = 0; j < n; ++j) terms.push_back({j, a(i, j)});
            p.add_constraint(terms, Relation::less_equal, b(i));
        }
        const double oracle = enumerate_vertices(a, b, lo, hi, c);
        const auto s = solve(p);
        if (!std::isfinite(oracle)) {
            CHECK(s.status == LpStatus::infeasible);
            continue;
        }
        REQUIRE(s.optimal());
        CHECK(s.objective_value == doctest::Approx(oracle).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("solve is deterministic") {
    const auto data = load_random_lps();
    const auto p = from_json(data["cases"][0]);
    const auto a = solve(p);
    const auto b = solve(p);
    CHECK(a.iterations == b.iterations);
    CHECK((a.primal - b.primal).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.dual - b.dual).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("validate rejects malformed problems") {
    LinearProblem p;
    const int x = p.add_variable("x", 1.0, 0.0);
    CHECK_THROWS_AS(solve(p), std::invalid_argument);
    p.set_bounds(x, 0.0, 1.0);
    p.add_constraint({{7, 1.0}}, Relation::equal, 0.0);
    CHECK_THROWS_AS(solve(p), std::invalid_argument);
}

TEST_CASE("LP text dump") {
    LinearProblem p;
    const int x = p.add_variable("gen_0", 0.0, 10.0, 20.0);
    const int t = p.add_variable("theta 1", -inf, inf, 0.0);
    p.add_constraint({{x, 1.0}, {t, -2.5}}, Relation::equal, 4.0, "balance_0");
    std::ostringstream os;
    write_lp_text(os, p);
    const std::string s = os.str();
    CHECK(s.find("Minimize") == 0);
    CHECK(s.find("balance_0: 1 gen_0 - 2.5 theta_1 = 4") != std::string::npos);
    CHECK(s.find("theta_1 free") != std::string::npos);
    CHECK(s.find("0 <= gen_0 <= 10") != std::string::npos);
}
