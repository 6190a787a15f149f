#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace lmesim {

// Hours x buses.  `hours[r]` is the hour index of row r.
struct LmeSeries {
    Eigen::MatrixXd values;
    std::vector<int> hours;
};

// Rows whose hour is in `drop` (sorted or not) are removed.
LmeSeries drop_hours(const LmeSeries& s, const std::vector<int>& drop);

// Reads a bus sensitivity dump (`hour,bus,lme,lmp,degenerate`) into a series.
LmeSeries read_lme_series(std::istream& in);

// Pearson correlation between bus columns.  Zero-variance columns correlate
// 0 with every other column; the diagonal is 1.
Eigen::MatrixXd correlation_matrix(const LmeSeries& s);

// 0.5 (1 - |corr|) + 0.5 |mean_i - mean_j| / max |mean_k - mean_l|, zero
// diagonal.  The mean term is 0 when every mean is equal.
Eigen::MatrixXd lme_distance(const LmeSeries& s);

// Leaves are 0..N-1; the cluster formed by merge m has id N+m.
struct Merge {
    int left = 0;
    int right = 0;
    double distance = 0.0;
    int size = 0;
};

struct ClusterResult {
    std::vector<int> labels;  // per bus, numbered by smallest member
    std::vector<Merge> linkage;
};

// Ward agglomeration on a precomputed distance matrix via the
// Lance-Williams update.  Ties go to the lowest (i, j) pair of active
// clusters, clusters being indexed by their smallest member.
std::vector<Merge> ward_linkage(const Eigen::MatrixXd& distance);
std::vector<int> cut_linkage(const std::vector<Merge>& linkage, int n, int k);
ClusterResult hierarchical_cluster(const Eigen::MatrixXd& distance, int k);

// Cluster counts ordered by the merge-distance jump that produces them,
// largest jump first.  Cutting below merge m leaves N-m clusters.
std::vector<int> gap_ranking(const std::vector<Merge>& linkage);

double rand_index(const std::vector<int>& a, const std::vector<int>& b);

void write_linkage_json(std::ostream& out, const ClusterResult& c, const std::vector<std::string>& bus_names);

enum class Grouping { hour_of_day, month };

int hour_of_day(int hour);
int month_of_hour(int hour);  // 0..11 on a 365-day year starting Jan 1

struct AggregateTable {
    Grouping grouping = Grouping::hour_of_day;
    std::vector<std::string> regions;  // sorted
    Eigen::MatrixXd mean;              // regions x buckets (NaN where empty)
    Eigen::MatrixXi count;
};

// Mean of all bus-hour values per (region, bucket).  `bus_region[b]` must be
// non-empty for every column.
AggregateTable temporal_aggregates(const LmeSeries& s, Grouping g, const std::vector<std::string>& bus_region);

void write_aggregates_csv(std::ostream& out, const AggregateTable& t);

}  // namespace lmesim
