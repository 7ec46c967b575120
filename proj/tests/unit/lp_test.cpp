#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "affinelens/errors.hpp"
#include "affinelens/lp.hpp"

using namespace affinelens;

namespace {

// Best objective over every vertex formed by d tight rows (d <= 3 here).
std::optional<double> vertex_bruteforce(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                        Sense sense)
{
    const int m = static_cast<int>(A.rows()), d = static_cast<int>(A.cols());
    std::optional<double> best;
    std::vector<int> idx(d);
    auto visit = [&](auto&& self, int start, int depth) -> void {
        if (depth == d) {
            Eigen::MatrixXd M(d, d);
            Eigen::VectorXd rhs(d);
            for (int k = 0; k < d; ++k) {
                M.row(k) = A.row(idx[k]);
                rhs(k) = -b(idx[k]);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
            if (lu.rank() < d)
                return;
            const Eigen::VectorXd x = lu.solve(rhs);
            if (((A * x + b).array() < -1e-9).any())
                return;
            const double v = c.dot(x);
            if (!best || (sense == Sense::minimize ? v < *best : v > *best))
                best = v;
            return;
        }
        for (int i = start; i < m; ++i) {
            idx[depth] = i;
            self(self, i + 1, depth + 1);
        }
    };
    visit(visit, 0, 0);
    return best;
}

Eigen::MatrixXd box_A(int d)
{
    Eigen::MatrixXd A(2 * d, d);
    A << Eigen::MatrixXd::Identity(d, d), -Eigen::MatrixXd::Identity(d, d);
    return A;
}

} // namespace

TEST(Lp, MinimizeOverBox)
{
    const auto s = solve_dense_lp(box_A(2), Eigen::VectorXd::Ones(4), Eigen::Vector2d(1, 0), Sense::minimize);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(*s.objective, -1.0, 1e-12);
}

TEST(Lp, MaximizeAtCorner)
{
    const auto s = solve_dense_lp(box_A(2), Eigen::VectorXd::Ones(4), Eigen::Vector2d(1, 1), Sense::maximize);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(*s.objective, 2.0, 1e-12);
    EXPECT_NEAR((*s.point)(0), 1.0, 1e-12);
    EXPECT_NEAR((*s.point)(1), 1.0, 1e-12);
}

TEST(Lp, ContradictoryRowsInfeasible)
{
    Eigen::MatrixXd A(2, 2);
    A << 1, 0, -1, 0;
    const auto s = solve_dense_lp(A, Eigen::Vector2d(-1, 0), Eigen::Vector2d::Zero(), Sense::minimize);
    EXPECT_EQ(s.status, LpStatus::infeasible);
    EXPECT_FALSE(s.point.has_value());
}

TEST(Lp, UnboundedDirection)
{
    Eigen::MatrixXd A(1, 2);
    A << 1, 0;
    const auto s = solve_dense_lp(A, Eigen::VectorXd::Zero(1), Eigen::Vector2d(1, 0), Sense::maximize);
    EXPECT_EQ(s.status, LpStatus::unbounded);
}

TEST(Lp, NoRowsZeroObjective)
{
    const auto s = solve_dense_lp(Eigen::MatrixXd(0, 3), Eigen::VectorXd(0), Eigen::VectorXd::Zero(3), Sense::minimize);
    ASSERT_TRUE(s.optimal());
    EXPECT_EQ(*s.objective, 0.0);
}

TEST(Lp, DegenerateVertexTerminates)
{
    // Many rows through the same corner (1, 1).
    const int k = 40;
    Eigen::MatrixXd A(k + 4, 2);
    Eigen::VectorXd b(k + 4);
    A.topRows(4) = box_A(2);
    b.head(4).setOnes();
    for (int i = 0; i < k; ++i) {
        const double t = 0.05 + 1.4 * i / k;
        A.row(4 + i) << -std::cos(t), -std::sin(t);
        b(4 + i) = std::cos(t) + std::sin(t);
    }
    for (Pricing p : {Pricing::dantzig, Pricing::bland}) {
        LpOptions opt;
        opt.bland_only = p == Pricing::bland;
        const auto s = solve_dense_lp(A, b, Eigen::Vector2d(1, 1), Sense::maximize, opt);
        ASSERT_TRUE(s.optimal());
        EXPECT_NEAR(*s.objective, 2.0, 1e-9);
    }
}

TEST(Lp, TinyBudgetThrows)
{
    LpOptions opt;
    opt.max_pivots = 1;
    EXPECT_THROW(solve_dense_lp(box_A(3), Eigen::VectorXd::Ones(6), Eigen::Vector3d(1, 1, 1), Sense::maximize, opt),
                 NumericalFailure);
}

TEST(Lp, CallCounter)
{
    const auto before = lp_calls_this_thread();
    solve_dense_lp(box_A(2), Eigen::VectorXd::Ones(4), Eigen::Vector2d(1, 0), Sense::minimize);
    solve_dense_lp(box_A(2), Eigen::VectorXd::Ones(4), Eigen::Vector2d(0, 1), Sense::minimize);
    EXPECT_EQ(lp_calls_this_thread() - before, 2u);
}

TEST(Lp, MatchesVertexEnumeration)
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.2, 1.5);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + trial % 2;
        const int extra = 3 + trial % 7;
        Eigen::MatrixXd A(2 * d + extra, d);
        Eigen::VectorXd b(2 * d + extra);
        A.topRows(2 * d) = box_A(d);
        b.head(2 * d).setConstant(2.0);
        for (int i = 0; i < extra; ++i) {
            for (int j = 0; j < d; ++j)
                A(2 * d + i, j) = g(rng);
            b(2 * d + i) = (trial % 5 == 0) ? -u(rng) * 3 : u(rng);
        }
        Eigen::VectorXd c(d);
        for (int j = 0; j < d; ++j)
            c(j) = g(rng);
        for (Sense sense : {Sense::minimize, Sense::maximize}) {
            const auto truth = vertex_bruteforce(A, b, c, sense);
            const auto s = solve_dense_lp(A, b, c, sense);
            if (!truth) {
                EXPECT_EQ(s.status, LpStatus::infeasible) << "trial " << trial;
                continue;
            }
            ASSERT_TRUE(s.optimal()) << "trial " << trial;
            EXPECT_NEAR(*s.objective, *truth, 1e-8) << "trial " << trial;
            EXPECT_GE((A * *s.point + b).minCoeff(), -1e-9);
        }
    }
}
