#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace lmesim {

inline constexpr double inf = std::numeric_limits<double>::infinity();

enum class Relation { less_equal, equal, greater_equal };

struct LpTerm {
    int var;
    double coef;
};

// Linear program in general form:
//   minimize c'x  s.t.  a_i'x (<=|=|>=) b_i,  lower <= x <= upper.
// Bounds may be infinite.  Built incrementally; immutable while being solved.
class LinearProblem {
public:
    int add_variable(std::string name, double lower, double upper, double cost = 0.0);
    int add_constraint(std::vector<LpTerm> terms, Relation rel, double rhs, std::string name = {});

    void set_cost(int var, double cost) { cost_.at(var) = cost; }
    void set_bounds(int var, double lower, double upper);
    void set_rhs(int row, double rhs) { rows_.at(row).rhs = rhs; }

    int num_variables() const { return static_cast<int>(cost_.size()); }
    int num_constraints() const { return static_cast<int>(rows_.size()); }

    double cost(int var) const { return cost_[var]; }
    double lower(int var) const { return lower_[var]; }
    double upper(int var) const { return upper_[var]; }
    const std::string& variable_name(int var) const { return var_names_[var]; }

    struct Row {
        std::vector<LpTerm> terms;
        Relation rel;
        double rhs;
        std::string name;
    };
    const Row& row(int i) const { return rows_[i]; }

    // Throws std::invalid_argument on dangling indices, inverted bounds, or
    // non-finite coefficients.
    void validate() const;

private:
    std::vector<std::string> var_names_;
    std::vector<double> lower_, upper_, cost_;
    std::vector<Row> rows_;
};

enum class LpStatus { optimal, infeasible, unbounded, numerical_failure };

const char* to_string(LpStatus s);

// Where a variable sits in the final basis.  `fixed` means lower == upper.
enum class BasisStatus { basic, at_lower, at_upper, fixed, free };

struct LpTolerances {
    double feas_tol = 1e-7;
    double duality_tol = 1e-6;
};

// A basis to start from: per variable and, per constraint, whether its
// slack is basic.  Equality rows are never basic.
struct LpBasis {
    std::vector<BasisStatus> columns;
    std::vector<char> rows;
};

struct LpSolution {
    LpStatus status = LpStatus::numerical_failure;
    Eigen::VectorXd primal;        // per variable
    Eigen::VectorXd dual;          // per constraint, d(objective)/d(rhs)
    Eigen::VectorXd reduced_cost;  // per variable, c_j - a_j'y
    std::vector<BasisStatus> basis_status;
    std::vector<char> row_basic;  // per constraint, slack in the final basis
    double objective_value = 0.0;

    int iterations = 0;
    double primal_residual = 0.0;
    double duality_gap = 0.0;
    double complementarity = 0.0;
    std::string diagnostics;

    bool optimal() const { return status == LpStatus::optimal; }
    LpBasis basis() const { return {basis_status, row_basic}; }

    // d(objective)/d(upper_j) and d(objective)/d(lower_j) for a forward
    // (increasing) perturbation of that bound.
    double upper_bound_dual(int var) const;
    double lower_bound_dual(int var) const;
};

// Bounded primal simplex on a dense tableau.  The arithmetic type of the
// tableau is `Scalar`; double and long double are instantiated.  Results are
// deterministic: Dantzig pricing with lowest-index ties, Bland's rule after a
// run of degenerate pivots.  A `start` basis that is singular or primal
// infeasible for this problem is ignored in favor of a crash basis.
template <typename Scalar = double>
LpSolution solve(const LinearProblem& problem, const LpTolerances& tol = {}, const LpBasis* start = nullptr);

extern template LpSolution solve<double>(const LinearProblem&, const LpTolerances&, const LpBasis*);
extern template LpSolution solve<long double>(const LinearProblem&, const LpTolerances&, const LpBasis*);

// CPLEX-style LP text dump for cross-checking with external solvers.
void write_lp_text(std::ostream& out, const LinearProblem& problem);

}  // namespace lmesim
