#include "lmesim/analysis.hpp"
#include "lmesim/errors.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace lmesim;

namespace {

LmeSeries series(const Eigen::MatrixXd& v) {
    LmeSeries s;
    s.values = v;
    for (Eigen::Index r = 0; r < v.rows(); ++r) s.hours.push_back(static_cast<int>(r));
    return s;
}

// Three blocks of buses sharing a block signal plus small noise; block means
// differ so the block-level distances differ too.
LmeSeries planted_blocks(std::mt19937_64& rng, int per_block, int hours, std::vector<int>& truth) {
    std::normal_distribution<double> g(0.0, 1.0);
    const double means[] = {50.0, 300.0, 780.0};
    Eigen::MatrixXd base(hours, 3);
    for (int t = 0; t < hours; ++t)
        for (int k = 0; k < 3; ++k) base(t, k) = 60.0 * g(rng);
    Eigen::MatrixXd v(hours, 3 * per_block);
    truth.clear();
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < per_block; ++i) {
            const int b = k * per_block + i;
            truth.push_back(k);
            for (int t = 0; t < hours; ++t) v(t, b) = means[k] + base(t, k) + 3.0 * g(rng);
        }
    return series(v);
}

}  // namespace

TEST_CASE("correlation basics") {
    Eigen::MatrixXd v(5, 4);
    v.col(0) << 1, 2, 3, 5, 8;
    v.col(1) = v.col(0);
    v.col(2) = -v.col(0);
    v.col(3).setZero();
    const auto c = correlation_matrix(series(v));
    CHECK(c(0, 1) == doctest::Approx(1.0));
    CHECK(c(0, 2) == doctest::Approx(-1.0));
    CHECK(c(0, 3) == 0.0);
    CHECK(c(3, 3) == 1.0);
    CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(correlation_matrix(series(v.topRows(1))), DataError);
}

TEST_CASE("distance construction") {
    Eigen::MatrixXd v(4, 3);
    v.col(0) << 1, 2, 3, 4;
    v.col(1) << 1, 2, 3, 4;
    v.col(2) << -6, -7, -8, -9;  // anti-correlated, mean gap is the largest
    const auto d = lme_distance(series(v));
    CHECK(d(0, 0) == 0.0);
    CHECK(d(0, 1) == doctest::Approx(0.0));
    // |corr| = 1 contributes nothing; only the full mean gap remains
    CHECK(d(0, 2) == doctest::Approx(0.5));
    CHECK(d(1, 2) == doctest::Approx(0.5));

    Eigen::MatrixXd w(4, 2);
    w.col(0) << 1, -1, 1, -1;
    w.col(1) << 11, 11, 9, 9;
    CHECK(lme_distance(series(w))(0, 1) == doctest::Approx(1.0));

    Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(4, 2, 3.0);
    const auto df = lme_distance(series(flat));
    CHECK(df(0, 1) == doctest::Approx(0.5));  // zero variance: corr 0, equal means
}

TEST_CASE("distance properties on random series") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 100.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd v(30, 12);
        for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = g(rng);
        if (trial % 3 == 0) v.col(4).setConstant(7.0);
        const auto d = lme_distance(series(v));
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.diagonal().cwiseAbs().maxCoeff() == 0.0);
        CHECK(d.minCoeff() >= 0.0);
        CHECK(d.maxCoeff() <= 1.0 + 1e-12);

        // uniform shift leaves both terms unchanged
        const Eigen::MatrixXd shifted = v.array() + 250.0;
        CHECK((lme_distance(series(shifted)) - d).cwiseAbs().maxCoeff() <= 1e-9);
        const auto a = hierarchical_cluster(d, 4), b = hierarchical_cluster(lme_distance(series(shifted)), 4);
        CHECK(a.labels == b.labels);

        const auto link = ward_linkage(d);
        REQUIRE(link.size() == 11);
        for (std::size_t m = 1; m < link.size(); ++m) CHECK(link[m].distance >= link[m - 1].distance - 1e-12);
        CHECK(link.back().size == 12);
    }
}

TEST_CASE("Ward clustering") {
    SUBCASE("k = N keeps singletons") {
        Eigen::MatrixXd d(3, 3);
        d << 0, 1, 2, 1, 0, 1.5, 2, 1.5, 0;
        const auto c = hierarchical_cluster(d, 3);
        CHECK(c.labels == std::vector<int>{0, 1, 2});
        CHECK(c.linkage.size() == 2);
        CHECK(c.linkage[0].left == 0);
        CHECK(c.linkage[0].right == 1);
        CHECK(c.linkage[1].left == 2);
        CHECK(c.linkage[1].right == 3);
        // Lance-Williams: (2*2 + 2*1.5 - 1*1) / 3
        CHECK(c.linkage[1].distance == doctest::Approx(2.0));
    }
    SUBCASE("planted distance blocks") {
        const int n = 12;
        Eigen::MatrixXd d(n, n);
        std::vector<int> truth(n);
        for (int i = 0; i < n; ++i) truth[i] = (i * 7) % 3;  // interleaved membership
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) d(i, j) = i == j ? 0.0 : truth[i] == truth[j] ? 0.05 : 0.9;
        const auto c = hierarchical_cluster(d, 3);
        CHECK(rand_index(c.labels, truth) == 1.0);
        CHECK(c.labels[0] == 0);
    }
    SUBCASE("planted series blocks") {
        std::mt19937_64 rng(21);
        std::vector<int> truth;
        const auto s = planted_blocks(rng, 6, 200, truth);
        const auto c = hierarchical_cluster(lme_distance(s), 3);
        CHECK(rand_index(c.labels, truth) == 1.0);
        const auto gaps = gap_ranking(c.linkage);
        REQUIRE(gaps.size() >= 2);
        CHECK(std::min(gaps[0], gaps[1]) == 2);
        CHECK(std::max(gaps[0], gaps[1]) == 3);
    }
    SUBCASE("ties break toward the lowest pair") {
        Eigen::MatrixXd d = Eigen::MatrixXd::Constant(4, 4, 1.0);
        d.diagonal().setZero();
        const auto link = ward_linkage(d);
        CHECK(link[0].left == 0);
        CHECK(link[0].right == 1);
    }
    SUBCASE("bad input") {
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
        CHECK_THROWS_AS(hierarchical_cluster(d, 0), ConfigError);
        CHECK_THROWS_AS(hierarchical_cluster(d, 4), ConfigError);
        d(0, 1) = 1.0;
        CHECK_THROWS_AS(ward_linkage(d), DataError);
    }
}

TEST_CASE("rand index") {
    CHECK(rand_index({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);
    CHECK(rand_index({0, 0, 1, 1}, {0, 1, 0, 1}) == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("linkage export") {
    Eigen::MatrixXd d(3, 3);
    d << 0, 1, 2, 1, 0, 1.5, 2, 1.5, 0;
    std::ostringstream os;
    write_linkage_json(os, hierarchical_cluster(d, 2), {"a", "b", "c"});
    const auto j = nlohmann::json::parse(os.str());
    CHECK(j["merges"].size() == 2);
    CHECK(j["merges"][1][3] == 3);
    CHECK(j["labels"] == nlohmann::json({0, 0, 1}));
}

TEST_CASE("calendar") {
    CHECK(hour_of_day(0) == 0);
    CHECK(hour_of_day(8759) == 23);
    CHECK(month_of_hour(0) == 0);
    CHECK(month_of_hour(31 * 24 - 1) == 0);
    CHECK(month_of_hour(31 * 24) == 1);
    CHECK(month_of_hour(8759) == 11);
    CHECK(month_of_hour(8760) == 0);
}

TEST_CASE("temporal aggregates") {
    const int hours = 24 * 30;
    SUBCASE("constant series") {
        const auto t = temporal_aggregates(series(Eigen::MatrixXd::Constant(hours, 3, 42.0)), Grouping::month,
                                           {"x", "y", "x"});
        CHECK(t.regions == std::vector<std::string>{"x", "y"});
        CHECK(t.mean(0, 0) == 42.0);
        CHECK(t.mean(1, 0) == 42.0);
        CHECK(t.count(0, 0) == 2 * hours);
    }
    SUBCASE("daily sinusoid") {
        Eigen::MatrixXd v(hours, 1);
        for (int h = 0; h < hours; ++h) v(h, 0) = std::sin(2.0 * std::numbers::pi * h / 24.0);
        const auto t = temporal_aggregates(series(v), Grouping::hour_of_day, {"r"});
        for (int b = 0; b < 24; ++b) CHECK(std::abs(t.mean(0, b) - std::sin(2.0 * std::numbers::pi * b / 24.0)) <= 1e-9);
    }
    SUBCASE("solar dip") {
        Eigen::MatrixXd v(hours, 2);
        for (int h = 0; h < hours; ++h) {
            const int hod = h % 24;
            v(h, 0) = (hod >= 9 && hod <= 15) ? 10.0 : 450.0;
            v(h, 1) = v(h, 0) + 5.0;
        }
        const auto t = temporal_aggregates(series(v), Grouping::hour_of_day, {"solar", "solar"});
        CHECK(t.mean(0, 12) < t.mean(0, 0));
        std::ostringstream os;
        write_aggregates_csv(os, t);
        CHECK(os.str().find("region,hour_of_day,mean,count\nsolar,0,452.5,60\n") != std::string::npos);
    }
    SUBCASE("unmapped region") {
        CHECK_THROWS_AS(temporal_aggregates(series(Eigen::MatrixXd::Zero(4, 2)), Grouping::month, {"a", ""}), DataError);
        CHECK_THROWS_AS(temporal_aggregates(series(Eigen::MatrixXd::Zero(4, 2)), Grouping::month, {"a"}), DataError);
    }
}

TEST_CASE("series I/O and hour filter") {
    std::istringstream in("# schema: lmesim.bus_sensitivity v1\nhour,bus,lme,lmp,degenerate\n"
                          "0,0,1,5,0\n0,1,2,5,0\n1,0,3,5,0\n1,1,4,5,1\n2,0,5,5,0\n2,1,6,5,0\n");
    const auto s = read_lme_series(in);
    CHECK(s.values.rows() == 3);
    CHECK(s.values(1, 1) == 4.0);
    const auto kept = drop_hours(s, {1});
    CHECK(kept.hours == std::vector<int>{0, 2});
    CHECK(kept.values(1, 0) == 5.0);
}
