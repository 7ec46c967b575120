#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace affinelens {

enum class LpStatus { optimal, infeasible, unbounded };
enum class Sense { minimize, maximize };

/// Entering-variable rule. Dantzig falls back to Bland after a degenerate run;
/// Bland from the start is the retry mode after a numerical failure.
enum class Pricing { dantzig, bland };

/// Result of one LP solve. `point` and `objective` are present iff status is optimal.
struct LPSolution {
    LpStatus status = LpStatus::infeasible;
    std::optional<Eigen::VectorXd> point;
    std::optional<double> objective;

    bool optimal() const { return status == LpStatus::optimal; }
};

struct LpOptions {
    /// Largest tolerated constraint violation of the returned vertex; also the
    /// phase-1 threshold separating feasible from infeasible.
    double eps_feas = 1e-9;
    /// Use Bland's rule from the first pivot instead of Dantzig pricing.
    bool bland_only = false;
    /// Pivot budget per phase; 0 picks a size-dependent default.
    std::int64_t max_pivots = 0;
};

/// Optimizes `objective . x` subject to `A x + b >= 0` with x free.
///
/// Dense two-phase primal simplex on the compact (Tucker) dictionary: the
/// tableau has one row per constraint and one column per nonbasic variable, so
/// a pivot costs O(rows * (cols + 2)) and the problem never grows with the
/// number of slack variables. Phase 1 uses a single artificial variable that
/// relaxes every row; Dantzig pricing falls back to Bland's rule after a run
/// of degenerate pivots.
///
/// Throws NumericalFailure when the pivot budget is exhausted or the final
/// vertex violates a constraint by more than eps_feas.
LPSolution solve_dense_lp(const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& b,
                          const Eigen::VectorXd& objective,
                          Sense sense,
                          const LpOptions& options = {});

/// Number of solve_dense_lp calls made on the calling thread since it started.
std::uint64_t lp_calls_this_thread();

} // namespace affinelens
