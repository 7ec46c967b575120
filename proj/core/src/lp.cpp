#include "affinelens/lp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "affinelens/errors.hpp"

namespace affinelens {

namespace {

thread_local std::uint64_t t_lp_calls = 0;

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr double kDegenerateStep = 1e-12;
constexpr int kDegenerateRunBeforeBland = 50;

enum class VarKind : std::uint8_t { free, nonneg, fixed };

using Tableau = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dictionary form: basic_i = T(i,0) + sum_j T(i,j) * nonbasic_j, for i < rows.
// Row `rows` holds the objective (maximized) in the same form.
class Dictionary {
public:
    Dictionary(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
        : rows_(A.rows()), n_(A.cols()), table_(A.rows() + 1, A.cols() + 2)
    {
        // Variables: 0..n-1 structural (free), n..n+m-1 slacks, n+m artificial.
        kind_.assign(n_ + rows_ + 1, VarKind::nonneg);
        for (Eigen::Index j = 0; j < n_; ++j)
            kind_[j] = VarKind::free;

        table_.setZero();
        for (Eigen::Index i = 0; i < rows_; ++i) {
            table_(i, 0) = b(i);
            for (Eigen::Index j = 0; j < n_; ++j)
                table_(i, j + 1) = A(i, j);
            table_(i, n_ + 1) = 1.0;
        }
        basis_.resize(rows_);
        for (Eigen::Index i = 0; i < rows_; ++i)
            basis_[i] = n_ + i;
        nonbasic_.resize(n_ + 1);
        for (Eigen::Index j = 0; j <= n_; ++j)
            nonbasic_[j] = j < n_ ? j : n_ + rows_;
    }

    Eigen::Index artificial() const { return n_ + rows_; }

    void pivot(Eigen::Index r, Eigen::Index c)
    {
        const double p = table_(r, c);
        Eigen::RowVectorXd row = -table_.row(r) / p;
        row(c) = 1.0 / p;
        table_.row(r) = row;
        for (Eigen::Index i = 0; i <= rows_; ++i) {
            if (i == r)
                continue;
            const double q = table_(i, c);
            if (q == 0.0)
                continue;
            table_(i, c) = 0.0;
            table_.row(i) += q * row;
        }
        std::swap(basis_[r], nonbasic_[c - 1]);
    }

    // Runs primal simplex on the objective row. Returns false if unbounded.
    bool optimize(const LpOptions& options, std::int64_t budget)
    {
        bool bland = options.bland_only;
        int degenerate_run = 0;
        for (std::int64_t it = 0;; ++it) {
            if (it >= budget)
                throw NumericalFailure("simplex pivot budget exhausted after " + std::to_string(it) +
                                       " pivots");

            Eigen::Index enter = -1;
            double dir = 1.0;
            double best = 0.0;
            bool best_free = false;
            for (Eigen::Index j = 1; j <= n_ + 1; ++j) {
                const auto var = nonbasic_[j - 1];
                const VarKind k = kind_[var];
                const double d = table_(rows_, j);
                if (k == VarKind::fixed)
                    continue;
                if (k == VarKind::nonneg && d <= kCostTol)
                    continue;
                if (k == VarKind::free && std::abs(d) <= kCostTol)
                    continue;
                const bool is_free = k == VarKind::free;
                if (bland) {
                    if (enter < 0 || var < nonbasic_[enter - 1]) {
                        enter = j;
                        dir = d > 0 ? 1.0 : -1.0;
                    }
                    continue;
                }
                // Free columns first: once basic they never leave.
                const double score = std::abs(d);
                if (enter < 0 || (is_free && !best_free) || (is_free == best_free && score > best)) {
                    enter = j;
                    dir = d > 0 ? 1.0 : -1.0;
                    best = score;
                    best_free = is_free;
                }
            }
            if (enter < 0)
                return true;

            Eigen::Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            double best_coef = 0.0;
            for (Eigen::Index i = 0; i < rows_; ++i) {
                const VarKind k = kind_[basis_[i]];
                if (k == VarKind::free)
                    continue;
                const double a = table_(i, enter) * dir;
                double ratio;
                if (k == VarKind::fixed) {
                    if (std::abs(a) <= kPivotTol)
                        continue;
                    ratio = 0.0;
                } else {
                    if (a >= -kPivotTol)
                        continue;
                    ratio = std::max(table_(i, 0), 0.0) / -a;
                }
                bool take = false;
                if (leave < 0 || ratio < best_ratio - 1e-13) {
                    take = true;
                } else if (ratio <= best_ratio + 1e-13) {
                    take = bland ? basis_[i] < basis_[leave] : std::abs(a) > best_coef;
                }
                if (take) {
                    leave = i;
                    best_ratio = std::min(ratio, best_ratio);
                    best_coef = std::abs(a);
                }
            }
            if (leave < 0)
                return false;

            pivot(leave, enter);

            if (best_ratio <= kDegenerateStep) {
                if (++degenerate_run > kDegenerateRunBeforeBland)
                    bland = true;
            } else {
                degenerate_run = 0;
            }
        }
    }

    // Value of a variable in the current basic solution.
    double value(Eigen::Index var) const
    {
        for (Eigen::Index i = 0; i < rows_; ++i)
            if (basis_[i] == var)
                return table_(i, 0);
        return 0.0;
    }

    Eigen::Index basic_row(Eigen::Index var) const
    {
        for (Eigen::Index i = 0; i < rows_; ++i)
            if (basis_[i] == var)
                return i;
        return -1;
    }

    // Objective row := sum_k coef[k] * var_k, expressed over the current nonbasics.
    void set_objective(const std::vector<std::pair<Eigen::Index, double>>& terms)
    {
        table_.row(rows_).setZero();
        for (const auto& [var, coef] : terms) {
            const Eigen::Index r = basic_row(var);
            if (r >= 0) {
                table_.row(rows_) += coef * table_.row(r);
            } else {
                for (Eigen::Index j = 0; j <= n_; ++j)
                    if (nonbasic_[j] == var)
                        table_(rows_, j + 1) += coef;
            }
        }
    }

    // Drives the artificial variable out of the basis (when possible) and freezes it at zero.
    void retire_artificial()
    {
        const Eigen::Index art = artificial();
        const Eigen::Index r = basic_row(art);
        if (r >= 0) {
            Eigen::Index best = -1;
            double mag = kPivotTol;
            for (Eigen::Index j = 1; j <= n_ + 1; ++j) {
                if (kind_[nonbasic_[j - 1]] == VarKind::fixed)
                    continue;
                if (std::abs(table_(r, j)) > mag) {
                    mag = std::abs(table_(r, j));
                    best = j;
                }
            }
            if (best >= 0)
                pivot(r, best);
        }
        kind_[art] = VarKind::fixed;
    }

    Eigen::Index rows() const { return rows_; }
    Eigen::Index structural() const { return n_; }

private:
    Eigen::Index rows_;
    Eigen::Index n_;
    Tableau table_;
    std::vector<VarKind> kind_;
    std::vector<Eigen::Index> basis_;
    std::vector<Eigen::Index> nonbasic_;
};

} // namespace

std::uint64_t lp_calls_this_thread()
{
    return t_lp_calls;
}

LPSolution solve_dense_lp(const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& b,
                          const Eigen::VectorXd& objective,
                          Sense sense,
                          const LpOptions& options)
{
    ++t_lp_calls;
    if (A.rows() != b.size())
        throw StructuralError("LP: constraint matrix and offset vector disagree in length");
    if (A.cols() != objective.size())
        throw StructuralError("LP: objective length does not match variable count");

    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    const std::int64_t budget =
        options.max_pivots > 0 ? options.max_pivots : 200 + 50 * static_cast<std::int64_t>(m + n);

    Dictionary dict(A, b);

    // Phase 1: minimize the artificial relaxation t.
    if (m > 0) {
        Eigen::Index worst = 0;
        for (Eigen::Index i = 1; i < m; ++i)
            if (b(i) < b(worst))
                worst = i;
        if (b(worst) < 0.0) {
            dict.pivot(worst, n + 1);
            dict.set_objective({{dict.artificial(), -1.0}});
            if (!dict.optimize(options, budget))
                throw NumericalFailure("LP phase 1 reported unbounded");
            if (dict.value(dict.artificial()) > options.eps_feas)
                return LPSolution{LpStatus::infeasible, std::nullopt, std::nullopt};
        }
    }
    dict.retire_artificial();

    const double sign = sense == Sense::maximize ? 1.0 : -1.0;
    std::vector<std::pair<Eigen::Index, double>> terms;
    terms.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j)
        if (objective(j) != 0.0)
            terms.emplace_back(j, sign * objective(j));
    dict.set_objective(terms);
    if (!dict.optimize(options, budget))
        return LPSolution{LpStatus::unbounded, std::nullopt, std::nullopt};

    Eigen::VectorXd x(n);
    for (Eigen::Index j = 0; j < n; ++j)
        x(j) = dict.value(j);

    if (m > 0) {
        const double worst_slack = (A * x + b).minCoeff();
        if (!(worst_slack >= -options.eps_feas))
            throw NumericalFailure("LP vertex violates a constraint by " + std::to_string(-worst_slack));
    }
    if (!x.allFinite())
        throw NumericalFailure("LP produced a non-finite vertex");

    return LPSolution{LpStatus::optimal, x, objective.dot(x)};
}

} // namespace affinelens
