#include "lmesim/lp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lmesim {

int LinearProblem::add_variable(std::string name, double lower, double upper, double cost) {
    var_names_.push_back(std::move(name));
    lower_.push_back(lower);
    upper_.push_back(upper);
    cost_.push_back(cost);
    return num_variables() - 1;
}

int LinearProblem::add_constraint(std::vector<LpTerm> terms, Relation rel, double rhs, std::string name) {
    rows_.push_back(Row{std::move(terms), rel, rhs, std::move(name)});
    return num_constraints() - 1;
}

void LinearProblem::set_bounds(int var, double lower, double upper) {
    lower_.at(var) = lower;
    upper_.at(var) = upper;
}

void LinearProblem::validate() const {
    for (int j = 0; j < num_variables(); ++j) {
        if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] > upper_[j] ||
            lower_[j] == inf || upper_[j] == -inf)
            throw std::invalid_argument("variable '" + var_names_[j] + "' has invalid bounds");
        if (!std::isfinite(cost_[j]))
            throw std::invalid_argument("variable '" + var_names_[j] + "' has non-finite cost");
    }
    for (int i = 0; i < num_constraints(); ++i) {
        const auto& r = rows_[i];
        if (!std::isfinite(r.rhs))
            throw std::invalid_argument("constraint " + std::to_string(i) + " has non-finite rhs");
        for (const auto& t : r.terms) {
            if (t.var < 0 || t.var >= num_variables())
                throw std::invalid_argument("constraint " + std::to_string(i) + " references undeclared variable " +
                                            std::to_string(t.var));
            if (!std::isfinite(t.coef))
                throw std::invalid_argument("constraint " + std::to_string(i) + " has non-finite coefficient");
        }
    }
}

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

double LpSolution::upper_bound_dual(int var) const {
    switch (basis_status[var]) {
        case BasisStatus::at_upper: return reduced_cost[var];
        case BasisStatus::fixed: return std::min(reduced_cost[var], 0.0);
        default: return 0.0;
    }
}

double LpSolution::lower_bound_dual(int var) const {
    switch (basis_status[var]) {
        case BasisStatus::at_lower: return reduced_cost[var];
        case BasisStatus::fixed: return std::max(reduced_cost[var], 0.0);
        default: return 0.0;
    }
}

namespace {

template <typename Scalar>
class DenseSimplex {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

    explicit DenseSimplex(const LinearProblem& p);
    LpSolution run(const LpTolerances& tol, const LpBasis* start);

private:
    enum class State : unsigned char { basic, lower, upper, free_zero };
    enum class Outcome { optimal, unbounded, iteration_limit, singular };

    Outcome iterate(const Vector& cost);
    void cold_start();
    bool warm_start(const LpBasis& start);
    bool refactor();
    void drop_artificials();
    void pivot(int row, int col);
    void drive_out_artificials();
    LpSolution extract(const LpTolerances& tol, LpStatus status);

    const LinearProblem& problem_;
    int m_ = 0;          // rows
    int n_ = 0;          // structural columns
    int art0_ = 0;       // first artificial column
    int ncol_ = 0;
    std::vector<int> slack_of_row_;

    Matrix a_;
    Vector b_, lo_, hi_, x_;
    Matrix t_;
    std::vector<int> basis_;
    std::vector<State> state_;
    std::vector<char> excluded_;

    Scalar piv_tol_ = Scalar(1e-9);
    Scalar primal_tol_ = Scalar(1e-9);
    Scalar opt_tol_ = Scalar(1e-9);
    int iterations_ = 0;
    int max_iterations_ = 0;
    int since_refactor_ = 0;
    static constexpr int refactor_period = 60;
    static constexpr int degenerate_run_for_bland = 40;
};

template <typename Scalar>
DenseSimplex<Scalar>::DenseSimplex(const LinearProblem& p) : problem_(p) {
    m_ = p.num_constraints();
    n_ = p.num_variables();
    int slacks = 0;
    slack_of_row_.assign(m_, -1);
    for (int i = 0; i < m_; ++i)
        if (p.row(i).rel != Relation::equal) slack_of_row_[i] = n_ + slacks++;
    art0_ = n_ + slacks;
    ncol_ = art0_ + m_;

    a_ = Matrix::Zero(m_, ncol_);
    b_.resize(m_);
    lo_.resize(ncol_);
    hi_.resize(ncol_);
    for (int j = 0; j < n_; ++j) {
        lo_(j) = Scalar(p.lower(j));
        hi_(j) = Scalar(p.upper(j));
    }
    for (int i = 0; i < m_; ++i) {
        const auto& r = p.row(i);
        for (const auto& t : r.terms) a_(i, t.var) += Scalar(t.coef);
        b_(i) = Scalar(r.rhs);
        if (int s = slack_of_row_[i]; s >= 0) {
            a_(i, s) = r.rel == Relation::less_equal ? Scalar(1) : Scalar(-1);
            lo_(s) = Scalar(0);
            hi_(s) = Scalar(inf);
        }
    }

    lo_.tail(m_).setZero();
    hi_.tail(m_).setConstant(Scalar(inf));

    double cmax = 1.0;
    for (int j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(p.cost(j)));
    opt_tol_ = Scalar(1e-9 * cmax);
    max_iterations_ = 50 * (m_ + ncol_) + 1000;
}

template <typename Scalar>
void DenseSimplex<Scalar>::cold_start() {
    x_ = Vector::Zero(ncol_);
    state_.assign(ncol_, State::lower);
    excluded_.assign(ncol_, 0);
    for (int j = 0; j < art0_; ++j) {
        if (std::isfinite(static_cast<double>(lo_(j)))) {
            x_(j) = lo_(j);
            state_[j] = State::lower;
        } else if (std::isfinite(static_cast<double>(hi_(j)))) {
            x_(j) = hi_(j);
            state_[j] = State::upper;
        } else {
            x_(j) = Scalar(0);
            state_[j] = State::free_zero;
        }
    }

    // Columns grouped by their first nonzero row; taking at most one per row
    // in row order keeps the crash basis triangular.
    std::vector<std::vector<int>> first_in_row(m_);
    for (int j = 0; j < art0_; ++j)
        for (int i = 0; i < m_; ++i)
            if (a_(i, j) != Scalar(0)) {
                first_in_row[i].push_back(j);
                break;
            }

    // Crash basis: per row, the slack or the first column that absorbs the
    // remaining residual within its bounds, otherwise an artificial with
    // coefficient sign(residual).
    Vector r = b_ - a_.leftCols(art0_) * x_.head(art0_);
    basis_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) {
        const int s = slack_of_row_[i];
        int pick = -1;
        if (s >= 0 && r(i) * a_(i, s) >= Scalar(0)) pick = s;
        for (std::size_t c = 0; pick < 0 && c < first_in_row[i].size(); ++c) {
            const int j = first_in_row[i][c];
            if (state_[j] == State::basic || j == s) continue;
            const Scalar v = x_(j) + r(i) / a_(i, j);
            if (v >= lo_(j) && v <= hi_(j) && (hi_(j) > lo_(j) || r(i) == Scalar(0))) pick = j;
        }
        const int art = art0_ + i;
        a_(i, art) = Scalar(0);
        if (pick >= 0) {
            const Scalar delta = r(i) / a_(i, pick);
            basis_[i] = pick;
            state_[pick] = State::basic;
            x_(pick) += delta;
            r -= a_.col(pick) * delta;
            r(i) = Scalar(0);
            a_(i, art) = Scalar(1);
            excluded_[art] = 1;
            hi_(art) = Scalar(0);
        } else {
            basis_[i] = art;
            state_[art] = State::basic;
        }
    }
    for (int i = 0; i < m_; ++i) {
        const int art = art0_ + i;
        if (basis_[i] != art) continue;
        a_(i, art) = r(i) >= Scalar(0) ? Scalar(1) : Scalar(-1);
        x_(art) = std::abs(r(i));
    }
}

template <typename Scalar>
bool DenseSimplex<Scalar>::warm_start(const LpBasis& start) {
    if (static_cast<int>(start.columns.size()) != n_ || static_cast<int>(start.rows.size()) != m_) return false;
    x_ = Vector::Zero(ncol_);
    state_.assign(ncol_, State::lower);
    excluded_.assign(ncol_, 1);
    basis_.clear();
    for (int j = 0; j < n_; ++j) {
        excluded_[j] = 0;
        const bool lo_ok = std::isfinite(static_cast<double>(lo_(j)));
        const bool hi_ok = std::isfinite(static_cast<double>(hi_(j)));
        switch (start.columns[j]) {
            case BasisStatus::basic:
                state_[j] = State::basic;
                basis_.push_back(j);
                break;
            case BasisStatus::at_upper:
                if (!hi_ok) return false;
                state_[j] = State::upper;
                x_(j) = hi_(j);
                break;
            case BasisStatus::at_lower:
            case BasisStatus::fixed:
                if (!lo_ok) return false;
                x_(j) = lo_(j);
                break;
            case BasisStatus::free:
                if (lo_ok) {
                    x_(j) = lo_(j);
                } else if (hi_ok) {
                    state_[j] = State::upper;
                    x_(j) = hi_(j);
                } else {
                    state_[j] = State::free_zero;
                }
                break;
        }
    }
    for (int i = 0; i < m_; ++i) {
        const int s = slack_of_row_[i];
        if (!start.rows[i]) continue;
        if (s < 0) return false;
        state_[s] = State::basic;
        basis_.push_back(s);
    }
    for (int i = 0; i < m_; ++i)
        if (int s = slack_of_row_[i]; s >= 0) excluded_[s] = 0;
    if (static_cast<int>(basis_.size()) != m_) return false;
    if (!refactor()) return false;
    for (int i = 0; i < m_; ++i) {
        const int k = basis_[i];
        const Scalar slack = primal_tol_ * (Scalar(1) + std::abs(x_(k)));
        if (x_(k) < lo_(k) - slack || x_(k) > hi_(k) + slack) return false;
    }
    return true;
}

template <typename Scalar>
void DenseSimplex<Scalar>::drop_artificials() {
    for (int i = 0; i < m_; ++i)
        if (basis_[i] >= art0_) return;  // a redundant row still needs its artificial
    ncol_ = art0_;
    a_.conservativeResize(m_, ncol_);
    lo_.conservativeResize(ncol_);
    hi_.conservativeResize(ncol_);
    x_.conservativeResize(ncol_);
    state_.resize(ncol_);
    excluded_.resize(ncol_);
    if (t_.cols() > ncol_) t_.conservativeResize(m_, ncol_);
}

template <typename Scalar>
bool DenseSimplex<Scalar>::refactor() {
    since_refactor_ = 0;
    if (m_ == 0) {
        t_.resize(0, ncol_);
        return true;
    }
    Matrix basis_matrix(m_, m_);
    for (int i = 0; i < m_; ++i) basis_matrix.col(i) = a_.col(basis_[i]);
    Eigen::PartialPivLU<Matrix> lu(basis_matrix);
    if (!(lu.rcond() > Scalar(1e-14))) return false;
    t_ = lu.solve(a_);
    Vector nonbasic = x_;
    for (int i = 0; i < m_; ++i) nonbasic(basis_[i]) = Scalar(0);
    Vector xb = lu.solve(b_ - a_ * nonbasic);
    for (int i = 0; i < m_; ++i) x_(basis_[i]) = xb(i);
    return true;
}

template <typename Scalar>
void DenseSimplex<Scalar>::pivot(int row, int col) {
    const Scalar p = t_(row, col);
    t_.row(row) /= p;
    Vector c = t_.col(col);
    c(row) = Scalar(0);
    const RowVector prow = t_.row(row);
    t_.noalias() -= c * prow;
    ++since_refactor_;
}

template <typename Scalar>
typename DenseSimplex<Scalar>::Outcome DenseSimplex<Scalar>::iterate(const Vector& cost) {
    bool bland = false;
    int degenerate_run = 0;
    bool verified = false;
    Vector cb(m_);
    while (true) {
        if (iterations_ >= max_iterations_) return Outcome::iteration_limit;
        if (since_refactor_ >= refactor_period && !refactor()) return Outcome::singular;

        for (int i = 0; i < m_; ++i) cb(i) = cost(basis_[i]);
        const Vector d = cost - t_.transpose() * cb;

        int enter = -1;
        Scalar best = Scalar(0);
        int dir = 0;
        for (int j = 0; j < ncol_; ++j) {
            if (state_[j] == State::basic || excluded_[j]) continue;
            Scalar score = Scalar(0);
            int jdir = 0;
            switch (state_[j]) {
                case State::lower:
                    if (hi_(j) > lo_(j) && d(j) < -opt_tol_) { score = -d(j); jdir = 1; }
                    break;
                case State::upper:
                    if (hi_(j) > lo_(j) && d(j) > opt_tol_) { score = d(j); jdir = -1; }
                    break;
                case State::free_zero:
                    if (std::abs(d(j)) > opt_tol_) { score = std::abs(d(j)); jdir = d(j) < 0 ? 1 : -1; }
                    break;
                case State::basic: break;
            }
            if (jdir == 0) continue;
            if (bland) { enter = j; dir = jdir; break; }
            if (score > best) { best = score; enter = j; dir = jdir; }
        }

        if (enter < 0) {
            // Confirm optimality on a fresh factorization before accepting it.
            if (verified || since_refactor_ == 0) return Outcome::optimal;
            if (!refactor()) return Outcome::singular;
            verified = true;
            continue;
        }
        verified = false;

        // Harris two-pass ratio test.
        Scalar relaxed = Scalar(inf);
        for (int i = 0; i < m_; ++i) {
            const Scalar alpha = Scalar(dir) * t_(i, enter);
            const int k = basis_[i];
            if (alpha > piv_tol_) {
                if (std::isfinite(static_cast<double>(lo_(k))))
                    relaxed = std::min(relaxed, (x_(k) - lo_(k) + primal_tol_) / alpha);
            } else if (alpha < -piv_tol_) {
                if (std::isfinite(static_cast<double>(hi_(k))))
                    relaxed = std::min(relaxed, (hi_(k) - x_(k) + primal_tol_) / -alpha);
            }
        }
        int leave = -1;
        Scalar step = Scalar(inf);
        Scalar leave_alpha = Scalar(0);
        for (int i = 0; i < m_; ++i) {
            const Scalar alpha = Scalar(dir) * t_(i, enter);
            const int k = basis_[i];
            Scalar ratio;
            if (alpha > piv_tol_ && std::isfinite(static_cast<double>(lo_(k))))
                ratio = (x_(k) - lo_(k)) / alpha;
            else if (alpha < -piv_tol_ && std::isfinite(static_cast<double>(hi_(k))))
                ratio = (hi_(k) - x_(k)) / -alpha;
            else
                continue;
            if (ratio > relaxed) continue;
            ratio = std::max(ratio, Scalar(0));
            bool take;
            if (leave < 0) take = true;
            else if (bland) take = k < basis_[leave];
            else take = std::abs(alpha) > std::abs(leave_alpha);
            if (take) {
                leave = i;
                step = ratio;
                leave_alpha = alpha;
            }
        }

        const Scalar flip = (state_[enter] == State::free_zero) ? Scalar(inf) : hi_(enter) - lo_(enter);
        if (leave < 0 && !std::isfinite(static_cast<double>(flip))) return Outcome::unbounded;
        ++iterations_;

        if (leave < 0 || flip <= step) {
            // Bound flip, basis unchanged.
            for (int i = 0; i < m_; ++i) x_(basis_[i]) -= Scalar(dir) * flip * t_(i, enter);
            if (state_[enter] == State::lower) {
                state_[enter] = State::upper;
                x_(enter) = hi_(enter);
            } else {
                state_[enter] = State::lower;
                x_(enter) = lo_(enter);
            }
            degenerate_run = 0;
            bland = false;
            continue;
        }

        for (int i = 0; i < m_; ++i) x_(basis_[i]) -= Scalar(dir) * step * t_(i, enter);
        x_(enter) += Scalar(dir) * step;
        const int out = basis_[leave];
        if (leave_alpha > 0) {
            x_(out) = lo_(out);
            state_[out] = State::lower;
        } else {
            x_(out) = hi_(out);
            state_[out] = State::upper;
        }
        state_[enter] = State::basic;
        basis_[leave] = enter;
        pivot(leave, enter);

        if (step <= Scalar(1e-12)) {
            if (++degenerate_run > degenerate_run_for_bland) bland = true;
        } else {
            degenerate_run = 0;
            bland = false;
        }
    }
}

template <typename Scalar>
void DenseSimplex<Scalar>::drive_out_artificials() {
    for (int j = art0_; j < ncol_; ++j) {
        excluded_[j] = 1;
        hi_(j) = Scalar(0);
        if (state_[j] != State::basic) {
            state_[j] = State::lower;
            x_(j) = Scalar(0);
        }
    }
    for (int i = 0; i < m_; ++i) {
        const int k = basis_[i];
        if (k < art0_) continue;
        x_(k) = Scalar(0);
        int best = -1;
        Scalar best_mag = Scalar(1e-7);
        for (int j = 0; j < art0_; ++j) {
            if (state_[j] == State::basic) continue;
            if (std::abs(t_(i, j)) > best_mag) { best_mag = std::abs(t_(i, j)); best = j; }
        }
        if (best < 0) continue;  // redundant row; the artificial stays basic at zero
        state_[k] = State::lower;
        state_[best] = State::basic;
        basis_[i] = best;
        pivot(i, best);
    }
}

template <typename Scalar>
LpSolution DenseSimplex<Scalar>::run(const LpTolerances& tol, const LpBasis* start) {
    if (start && warm_start(*start)) {
        drop_artificials();
    } else {
        cold_start();
        drop_artificials();
        if (!refactor()) return extract(tol, LpStatus::numerical_failure);
    }

    bool need_phase1 = false;
    for (int i = 0; i < m_; ++i) need_phase1 |= basis_[i] >= art0_;
    if (need_phase1) {
        Vector phase1 = Vector::Zero(ncol_);
        for (int j = art0_; j < ncol_; ++j) phase1(j) = excluded_[j] ? Scalar(0) : Scalar(1);
        const Outcome o = iterate(phase1);
        if (o != Outcome::optimal) {
            auto s = extract(tol, LpStatus::numerical_failure);
            s.diagnostics = "phase 1 stopped: " + std::string(o == Outcome::singular ? "singular basis"
                                                                                    : "iteration limit");
            return s;
        }
        Scalar infeas = Scalar(0);
        for (int j = art0_; j < ncol_; ++j) infeas += x_(j);
        const Scalar bscale = Scalar(1) + (m_ ? b_.cwiseAbs().maxCoeff() : Scalar(0));
        if (infeas > Scalar(tol.feas_tol) * bscale) {
            auto s = extract(tol, LpStatus::infeasible);
            std::ostringstream os;
            os << "phase 1 infeasibility " << static_cast<double>(infeas);
            s.diagnostics = os.str();
            return s;
        }
    }
    if (need_phase1) {
        drive_out_artificials();
        drop_artificials();
        if (!refactor()) return extract(tol, LpStatus::numerical_failure);
    }

    Vector cost = Vector::Zero(ncol_);
    for (int j = 0; j < n_; ++j) cost(j) = Scalar(problem_.cost(j));
    const Outcome o = iterate(cost);
    switch (o) {
        case Outcome::optimal: return extract(tol, LpStatus::optimal);
        case Outcome::unbounded: return extract(tol, LpStatus::unbounded);
        case Outcome::iteration_limit: {
            auto s = extract(tol, LpStatus::numerical_failure);
            s.diagnostics = "iteration limit reached after " + std::to_string(iterations_) + " pivots";
            return s;
        }
        case Outcome::singular: {
            auto s = extract(tol, LpStatus::numerical_failure);
            s.diagnostics = "singular basis after " + std::to_string(iterations_) + " pivots";
            return s;
        }
    }
    return extract(tol, LpStatus::numerical_failure);
}

template <typename Scalar>
LpSolution DenseSimplex<Scalar>::extract(const LpTolerances& tol, LpStatus status) {
    LpSolution s;
    s.status = status;
    s.iterations = iterations_;
    s.primal = x_.head(n_).template cast<double>();
    s.basis_status.resize(n_);
    for (int j = 0; j < n_; ++j) {
        if (state_[j] == State::basic) s.basis_status[j] = BasisStatus::basic;
        else if (problem_.lower(j) == problem_.upper(j)) s.basis_status[j] = BasisStatus::fixed;
        else if (state_[j] == State::lower) s.basis_status[j] = BasisStatus::at_lower;
        else if (state_[j] == State::upper) s.basis_status[j] = BasisStatus::at_upper;
        else s.basis_status[j] = BasisStatus::free;
    }
    s.row_basic.assign(m_, 0);
    for (int i = 0; i < m_; ++i)
        if (int sl = slack_of_row_[i]; sl >= 0 && state_[sl] == State::basic) s.row_basic[i] = 1;
    s.objective_value = 0.0;
    for (int j = 0; j < n_; ++j) s.objective_value += problem_.cost(j) * s.primal(j);
    s.dual = Eigen::VectorXd::Zero(m_);
    s.reduced_cost = Eigen::VectorXd::Zero(n_);
    if (status != LpStatus::optimal) return s;

    // Duals from a fresh factorization: B'y = c_B.
    Vector y = Vector::Zero(m_);
    if (m_ > 0) {
        Matrix bt(m_, m_);
        Vector cb(m_);
        for (int i = 0; i < m_; ++i) {
            bt.row(i) = a_.col(basis_[i]).transpose();
            cb(i) = basis_[i] < n_ ? Scalar(problem_.cost(basis_[i])) : Scalar(0);
        }
        Eigen::PartialPivLU<Matrix> lu(bt);
        y = lu.solve(cb);
    }
    s.dual = y.template cast<double>();
    for (int j = 0; j < n_; ++j)
        s.reduced_cost(j) = static_cast<double>(Scalar(problem_.cost(j)) - a_.col(j).dot(y));

    // Residuals in the caller's terms.
    double residual = 0.0, complementarity = 0.0;
    double dual_objective = 0.0;
    for (int j = 0; j < n_; ++j) {
        const double xj = s.primal(j), lo = problem_.lower(j), hi = problem_.upper(j);
        residual = std::max({residual, lo - xj, xj - hi});
        const double dj = s.reduced_cost(j);
        const double gap_lo = std::isfinite(lo) ? std::abs(xj - lo) : inf;
        const double gap_hi = std::isfinite(hi) ? std::abs(xj - hi) : inf;
        double slackness = std::min(gap_lo, gap_hi);
        if (!std::isfinite(slackness)) slackness = 0.0;
        switch (s.basis_status[j]) {
            case BasisStatus::basic: complementarity = std::max(complementarity, std::abs(dj)); break;
            case BasisStatus::at_lower: complementarity = std::max(complementarity, std::max(-dj, 0.0)); break;
            case BasisStatus::at_upper: complementarity = std::max(complementarity, std::max(dj, 0.0)); break;
            case BasisStatus::free: complementarity = std::max(complementarity, std::abs(dj)); break;
            case BasisStatus::fixed: break;
        }
        if (s.basis_status[j] != BasisStatus::basic)
            complementarity = std::max(complementarity, std::abs(dj) * slackness);
        dual_objective += dj * xj;
    }
    for (int i = 0; i < m_; ++i) {
        const auto& r = problem_.row(i);
        double activity = 0.0;
        for (const auto& t : r.terms) activity += t.coef * s.primal(t.var);
        const double yi = s.dual(i);
        switch (r.rel) {
            case Relation::equal: residual = std::max(residual, std::abs(activity - r.rhs)); break;
            case Relation::less_equal:
                residual = std::max(residual, activity - r.rhs);
                complementarity = std::max({complementarity, std::abs(yi) * std::abs(r.rhs - activity), yi});
                break;
            case Relation::greater_equal:
                residual = std::max(residual, r.rhs - activity);
                complementarity = std::max({complementarity, std::abs(yi) * std::abs(activity - r.rhs), -yi});
                break;
        }
        dual_objective += r.rhs * yi;
    }
    s.primal_residual = residual;
    s.complementarity = complementarity;
    s.duality_gap = std::abs(s.objective_value - dual_objective);

    if (residual > tol.feas_tol || complementarity > tol.duality_tol ||
        s.duality_gap > tol.duality_tol * std::max(1.0, std::abs(s.objective_value))) {
        std::ostringstream os;
        os << "KKT check failed after " << iterations_ << " pivots: primal residual " << residual
           << ", complementarity " << complementarity << ", duality gap " << s.duality_gap;
        s.diagnostics = os.str();
        s.status = LpStatus::numerical_failure;
    }
    return s;
}

}  // namespace

template <typename Scalar>
LpSolution solve(const LinearProblem& problem, const LpTolerances& tol, const LpBasis* start) {
    problem.validate();
    DenseSimplex<Scalar> simplex(problem);
    return simplex.run(tol, start);
}

template LpSolution solve<double>(const LinearProblem&, const LpTolerances&, const LpBasis*);
template LpSolution solve<long double>(const LinearProblem&, const LpTolerances&, const LpBasis*);

namespace {

std::string lp_name(const std::string& name, char prefix, int index) {
    if (name.empty()) return prefix + std::to_string(index);
    std::string out;
    for (char ch : name) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') ? ch : '_';
    if (std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(out.begin(), prefix);
    return out;
}

void write_term(std::ostream& out, double coef, const std::string& var, bool first) {
    if (coef < 0) out << (first ? "- " : " - ");
    else if (!first) out << " + ";
    out << std::abs(coef) << ' ' << var;
}

}  // namespace

void write_lp_text(std::ostream& out, const LinearProblem& p) {
    std::vector<std::string> names(p.num_variables());
    for (int j = 0; j < p.num_variables(); ++j) names[j] = lp_name(p.variable_name(j), 'x', j);

    const auto old_precision = out.precision(17);
    out << "Minimize\n obj: ";
    bool first = true;
    for (int j = 0; j < p.num_variables(); ++j) {
        if (p.cost(j) == 0.0) continue;
        write_term(out, p.cost(j), names[j], first);
        first = false;
    }
    if (first) out << "0 " << (names.empty() ? "x0" : names[0]);
    out << "\nSubject To\n";
    for (int i = 0; i < p.num_constraints(); ++i) {
        const auto& r = p.row(i);
        out << ' ' << lp_name(r.name, 'c', i) << ": ";
        std::map<int, double> merged;
        for (const auto& t : r.terms) merged[t.var] += t.coef;
        first = true;
        for (const auto& [var, coef] : merged) {
            write_term(out, coef, names[var], first);
            first = false;
        }
        if (first) out << "0 " << names.at(0);
        out << (r.rel == Relation::less_equal ? " <= " : r.rel == Relation::equal ? " = " : " >= ") << r.rhs << '\n';
    }
    out << "Bounds\n";
    for (int j = 0; j < p.num_variables(); ++j) {
        const double lo = p.lower(j), hi = p.upper(j);
        if (lo == -inf && hi == inf) out << ' ' << names[j] << " free\n";
        else if (lo == hi) out << ' ' << names[j] << " = " << lo << '\n';
        else {
            out << ' ';
            if (lo == -inf) out << "-inf"; else out << lo;
            out << " <= " << names[j] << " <= ";
            if (hi == inf) out << "+inf"; else out << hi;
            out << '\n';
        }
    }
    out << "End\n";
    out.precision(old_precision);
}

}  // namespace lmesim
