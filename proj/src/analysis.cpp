#include "lmesim/analysis.hpp"

#include "csv.hpp"
#include "lmesim/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>

namespace lmesim {

using csv::fmt;

LmeSeries drop_hours(const LmeSeries& s, const std::vector<int>& drop) {
    const std::set<int> gone(drop.begin(), drop.end());
    std::vector<int> keep;
    for (std::size_t r = 0; r < s.hours.size(); ++r)
        if (!gone.count(s.hours[r])) keep.push_back(static_cast<int>(r));
    LmeSeries out;
    out.values.resize(static_cast<Eigen::Index>(keep.size()), s.values.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.values.row(static_cast<Eigen::Index>(i)) = s.values.row(keep[i]);
        out.hours.push_back(s.hours[keep[i]]);
    }
    return out;
}

LmeSeries read_lme_series(std::istream& in) {
    std::string line;
    long line_no = 0;
    if (!csv::next_record(in, line, line_no)) throw DataError("lme series: empty input");
    const auto header = csv::split(line);
    auto column = [&](std::string_view name) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return c;
        throw DataError("lme series: missing column '" + std::string(name) + "'");
    };
    const std::size_t ch = column("hour"), cb = column("bus"), cl = column("lme");
    std::map<int, std::map<int, double>> rows;
    int max_bus = -1;
    while (csv::next_record(in, line, line_no)) {
        const auto cells = csv::split(line);
        const std::string where = "lme series line " + std::to_string(line_no);
        if (cells.size() != header.size()) throw DataError(where + ": wrong field count");
        const int h = static_cast<int>(csv::to_int(cells[ch], where));
        const int b = static_cast<int>(csv::to_int(cells[cb], where));
        if (b < 0) throw DataError(where + ": negative bus");
        rows[h][b] = csv::to_double(cells[cl], where);
        max_bus = std::max(max_bus, b);
    }
    LmeSeries s;
    s.values.resize(static_cast<Eigen::Index>(rows.size()), max_bus + 1);
    Eigen::Index r = 0;
    for (const auto& [h, buses] : rows) {
        if (static_cast<int>(buses.size()) != max_bus + 1)
            throw DataError("lme series: hour " + std::to_string(h) + " does not cover every bus");
        for (const auto& [b, v] : buses) s.values(r, b) = v;
        s.hours.push_back(h);
        ++r;
    }
    return s;
}

Eigen::MatrixXd correlation_matrix(const LmeSeries& s) {
    const Eigen::Index t = s.values.rows(), n = s.values.cols();
    if (t < 2) throw DataError("correlation needs at least 2 hours");
    const Eigen::MatrixXd centered = s.values.rowwise() - s.values.colwise().mean();
    const Eigen::VectorXd norm = centered.colwise().norm();
    // Relative cutoff so rounding noise in a constant column is not read as variance.
    const Eigen::VectorXd scale = s.values.cwiseAbs().colwise().maxCoeff();
    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        corr(i, i) = 1.0;
        if (norm(i) <= 1e-12 * std::sqrt(static_cast<double>(t)) * std::max(scale(i), 1.0)) continue;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (norm(j) <= 1e-12 * std::sqrt(static_cast<double>(t)) * std::max(scale(j), 1.0)) continue;
            const double c = std::clamp(centered.col(i).dot(centered.col(j)) / (norm(i) * norm(j)), -1.0, 1.0);
            corr(i, j) = corr(j, i) = c;
        }
    }
    return corr;
}

Eigen::MatrixXd lme_distance(const LmeSeries& s) {
    const Eigen::MatrixXd corr = correlation_matrix(s);
    const Eigen::VectorXd mean = s.values.colwise().mean();
    const double spread = mean.size() ? mean.maxCoeff() - mean.minCoeff() : 0.0;
    const Eigen::Index n = corr.rows();
    Eigen::MatrixXd d(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) {
                d(i, j) = 0.0;
                continue;
            }
            const double gap = spread > 0.0 ? std::abs(mean(i) - mean(j)) / spread : 0.0;
            d(i, j) = 0.5 * (1.0 - std::abs(corr(i, j))) + 0.5 * gap;
        }
    return d;
}

std::vector<Merge> ward_linkage(const Eigen::MatrixXd& distance) {
    const int n = static_cast<int>(distance.rows());
    if (distance.cols() != n) throw DataError("distance matrix must be square");
    if (n == 0) throw DataError("distance matrix is empty");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(distance(i, j)) || distance(i, j) < 0.0 ||
                std::abs(distance(i, j) - distance(j, i)) > 1e-12)
                throw DataError("distance matrix must be finite, non-negative and symmetric");

    Eigen::MatrixXd d = distance;
    std::vector<int> id(n), size(n, 1);
    std::iota(id.begin(), id.end(), 0);
    std::vector<bool> active(n, true);
    std::vector<Merge> out;
    out.reserve(n > 0 ? n - 1 : 0);
    for (int step = 0; step + 1 < n; ++step) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (int j = i + 1; j < n; ++j)
                if (active[j] && d(i, j) < best) {
                    best = d(i, j);
                    bi = i;
                    bj = j;
                }
        }
        const double ni = size[bi], nj = size[bj];
        for (int k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) continue;
            const double nk = size[k];
            const double v = ((ni + nk) * d(k, bi) + (nj + nk) * d(k, bj) - nk * best) / (ni + nj + nk);
            d(k, bi) = d(bi, k) = v;
        }
        out.push_back({std::min(id[bi], id[bj]), std::max(id[bi], id[bj]), best, size[bi] + size[bj]});
        // slot bi keeps the smaller member index, so it stays the cluster's slot
        size[bi] += size[bj];
        id[bi] = n + step;
        active[bj] = false;
    }
    return out;
}

std::vector<int> cut_linkage(const std::vector<Merge>& linkage, int n, int k) {
    if (k < 1 || k > n) throw ConfigError("cluster count k must lie in 1.." + std::to_string(n));
    std::vector<int> parent(2 * n);
    std::iota(parent.begin(), parent.end(), 0);
    auto root = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int m = 0; m < n - k; ++m) {
        parent[root(linkage[m].left)] = n + m;
        parent[root(linkage[m].right)] = n + m;
    }
    std::map<int, int> label_of_root;
    std::vector<int> labels(n);
    for (int b = 0; b < n; ++b) {
        const int r = root(b);
        auto it = label_of_root.find(r);
        if (it == label_of_root.end()) it = label_of_root.emplace(r, static_cast<int>(label_of_root.size())).first;
        labels[b] = it->second;
    }
    return labels;
}

ClusterResult hierarchical_cluster(const Eigen::MatrixXd& distance, int k) {
    const int n = static_cast<int>(distance.rows());
    if (k < 1 || k > n) throw ConfigError("cluster count k must lie in 1.." + std::to_string(n));
    ClusterResult c;
    c.linkage = ward_linkage(distance);
    c.labels = cut_linkage(c.linkage, n, k);
    return c;
}

std::vector<int> gap_ranking(const std::vector<Merge>& linkage) {
    const int n = static_cast<int>(linkage.size()) + 1;
    std::vector<std::pair<double, int>> gaps;
    for (int m = 1; m < static_cast<int>(linkage.size()); ++m)
        gaps.push_back({linkage[m].distance - linkage[m - 1].distance, n - m});
    std::stable_sort(gaps.begin(), gaps.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<int> out;
    for (const auto& g : gaps) out.push_back(g.second);
    return out;
}

double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw DataError("rand index: label vectors differ in length");
    const std::size_t n = a.size();
    if (n < 2) return 1.0;
    long agree = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j, ++pairs)
            if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
    return static_cast<double>(agree) / static_cast<double>(pairs);
}

void write_linkage_json(std::ostream& out, const ClusterResult& c, const std::vector<std::string>& bus_names) {
    using ojson = nlohmann::ordered_json;
    ojson j;
    j["schema"] = "lmesim.linkage v1";
    j["method"] = "ward";
    j["leaves"] = bus_names;
    j["labels"] = c.labels;
    ojson merges = ojson::array();
    for (const auto& m : c.linkage) merges.push_back(ojson::array({m.left, m.right, m.distance, m.size}));
    j["merges"] = merges;  // scipy linkage-matrix rows
    out << j.dump(1) << '\n';
}

int hour_of_day(int hour) { return hour % 24; }

int month_of_hour(int hour) {
    static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int day = (hour / 24) % 365;
    for (int m = 0; m < 12; ++m) {
        if (day < days[m]) return m;
        day -= days[m];
    }
    return 11;
}

AggregateTable temporal_aggregates(const LmeSeries& s, Grouping g, const std::vector<std::string>& bus_region) {
    if (static_cast<Eigen::Index>(bus_region.size()) != s.values.cols())
        throw DataError("aggregates: region map size differs from bus count");
    if (static_cast<Eigen::Index>(s.hours.size()) != s.values.rows())
        throw DataError("aggregates: series has no timestamps");
    std::map<std::string, int> region_index;
    for (std::size_t b = 0; b < bus_region.size(); ++b) {
        if (bus_region[b].empty()) throw DataError("aggregates: bus " + std::to_string(b) + " has no region");
        region_index.emplace(bus_region[b], 0);
    }
    AggregateTable t;
    t.grouping = g;
    for (auto& [name, idx] : region_index) {
        idx = static_cast<int>(t.regions.size());
        t.regions.push_back(name);
    }
    const int buckets = g == Grouping::hour_of_day ? 24 : 12;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.regions.size()), buckets);
    t.count = Eigen::MatrixXi::Zero(sum.rows(), buckets);
    for (Eigen::Index r = 0; r < s.values.rows(); ++r) {
        const int bucket = g == Grouping::hour_of_day ? hour_of_day(s.hours[r]) : month_of_hour(s.hours[r]);
        for (Eigen::Index b = 0; b < s.values.cols(); ++b) {
            const int reg = region_index[bus_region[b]];
            sum(reg, bucket) += s.values(r, b);
            ++t.count(reg, bucket);
        }
    }
    t.mean = sum.array() / t.count.cast<double>().array();
    return t;
}

void write_aggregates_csv(std::ostream& out, const AggregateTable& t) {
    out << "# schema: lmesim.aggregates v1\n"
        << "region," << (t.grouping == Grouping::hour_of_day ? "hour_of_day" : "month") << ",mean,count\n";
    for (std::size_t r = 0; r < t.regions.size(); ++r)
        for (Eigen::Index b = 0; b < t.mean.cols(); ++b)
            if (t.count(static_cast<Eigen::Index>(r), b) > 0)
                out << t.regions[r] << ',' << b << ',' << fmt(t.mean(static_cast<Eigen::Index>(r), b)) << ','
                    << t.count(static_cast<Eigen::Index>(r), b) << '\n';
}

}  // namespace lmesim
