#include <gtest/gtest.h>

#include <algorithm>

#include "affinelens/enumerator.hpp"
#include "affinelens/errors.hpp"
#include "affinelens/oracle.hpp"
#include "fixtures.hpp"

using namespace affinelens;
using namespace affinelens::testing;

namespace {

Network layer_net(const Eigen::MatrixXd& W, const Eigen::VectorXd& b)
{
    return Network(static_cast<int>(W.cols()),
                   {LayerSpec::dense(W, b), LayerSpec::relu(),
                    LayerSpec::dense(Eigen::MatrixXd::Ones(1, W.rows()), Eigen::VectorXd::Zero(1))});
}

bool subset(const std::set<std::string>& a, const std::set<std::string>& b)
{
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

} // namespace

TEST(Oracle, ZeroNetSinglePattern)
{
    const auto p = enumerate_patterns_bruteforce(layer_net(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3)),
                                                 HPolytope::box(2));
    EXPECT_EQ(p.patterns, (std::set<std::string>{"000"}));
    EXPECT_EQ(p.method, PatternMethod::exhaustive_lp);
}

TEST(Oracle, ConstantRowUsesBiasSign)
{
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2, 2);
    W(0, 0) = 1.0;
    const auto p = enumerate_patterns_bruteforce(layer_net(W, Eigen::Vector2d(0.0, 0.5)), HPolytope::box(2));
    EXPECT_EQ(p.patterns, (std::set<std::string>{"01", "11"}));
}

TEST(Oracle, OneNeuronTwoPatterns)
{
    const auto p = enumerate_patterns_bruteforce(layer_net(Eigen::MatrixXd::Ones(1, 2), Eigen::VectorXd::Zero(1)),
                                                 HPolytope::box(2));
    EXPECT_EQ(p.patterns.size(), 2u);
}

TEST(Oracle, CapEnforced)
{
    const Network net = random_mlp(2, {11, 10}, 1, 3);
    EXPECT_THROW(enumerate_patterns_bruteforce(net, HPolytope::box(2)), CapExceeded);
}

TEST(Oracle, GridFindsHalfBoxSplit)
{
    const auto g = grid_sample_patterns(layer_net(Eigen::MatrixXd(Eigen::RowVector2d(1, 0)), Eigen::VectorXd::Zero(1)),
                                        HPolytope::box(2), 2);
    EXPECT_EQ(g.patterns, (std::set<std::string>{"0", "1"}));
    EXPECT_EQ(g.method, PatternMethod::grid);
}

TEST(Oracle, GridMissesSliver)
{
    // Two near-parallel planes 1e-3 apart: the strip between them is a region a 50^2 grid cannot see.
    Eigen::MatrixXd W(2, 2);
    W << 1, 0.001, 1, -0.001;
    const Network net = layer_net(W, Eigen::Vector2d(0.0101, -0.0101));
    const auto exact = enumerate_patterns_bruteforce(net, HPolytope::box(2));
    const auto grid = grid_sample_patterns(net, HPolytope::box(2), 50);
    EXPECT_TRUE(subset(grid.patterns, exact.patterns));
    EXPECT_LT(grid.patterns.size(), exact.patterns.size());
    const auto found = find_cpas(net, HPolytope::box(2));
    EXPECT_EQ(found.regions.size(), exact.patterns.size());
}

TEST(Oracle, GridIsSubsetOfExhaustive)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Network net = random_mlp(2, {3, 3}, 1, 500 + seed);
        const auto exact = enumerate_patterns_bruteforce(net, HPolytope::box(2));
        const auto grid = grid_sample_patterns(net, HPolytope::box(2), 40);
        EXPECT_TRUE(subset(grid.patterns, exact.patterns)) << "seed " << seed;
    }
}

TEST(Oracle, GridMonotoneInResolution)
{
    const Network net = random_mlp(2, {4, 3}, 1, 71);
    // Doubling keeps every previous lattice point, so the set can only grow.
    std::set<std::string> prev;
    for (int res : {5, 9, 17, 33, 65}) {
        const auto g = grid_sample_patterns(net, HPolytope::box(2), res);
        EXPECT_TRUE(subset(prev, g.patterns)) << res;
        prev = g.patterns;
    }
}

TEST(Oracle, CellCounts)
{
    const std::vector<Hyperplane> axes = {{Eigen::Vector2d(1, 0), 0.0}, {Eigen::Vector2d(0, 1), 0.0}};
    EXPECT_EQ(count_cells_bruteforce(axes, HPolytope::box(2)), 4u);
    const auto three = random_lines(3, 99);
    EXPECT_EQ(count_cells_bruteforce(three, HPolytope::box(2)), 7u);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto lines = random_lines(4, seed);
        EXPECT_LE(count_cells_bruteforce(lines, HPolytope::box(2)), cell_bound(4, 2));
    }
}

TEST(Oracle, CompareReportsBothSides)
{
    const PatternDiff d = compare_patterns({"00", "01", "11"}, {"00", "10", "11"});
    EXPECT_EQ(d.missing, std::vector<std::string>{"01"});
    EXPECT_EQ(d.extra, std::vector<std::string>{"10"});
    EXPECT_FALSE(d.match());
    EXPECT_TRUE(compare_patterns({"1"}, {"1"}).match());
}
