#include "affinelens/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "affinelens/errors.hpp"

namespace affinelens {

namespace {

// Affine state of the op walk: current vector = W x + b, plus the residual stack.
struct AffineState {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
    std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> skips;
};

// Advances `state` through ops until the next activation; returns that op index or ops.size().
std::size_t advance(const Network& net, std::size_t op, AffineState& state)
{
    const auto& layers = net.layers();
    for (; op < layers.size(); ++op) {
        const LayerSpec& l = layers[op];
        switch (l.kind) {
        case LayerKind::dense:
        case LayerKind::flattened_conv:
            state.W = l.weight * state.W;
            state.b = l.weight * state.b + l.bias;
            break;
        case LayerKind::batchnorm:
            state.W = l.bn_scale.asDiagonal() * state.W;
            state.b = l.bn_scale.cwiseProduct(state.b) + l.bn_shift;
            break;
        case LayerKind::residual_begin:
            state.skips.emplace_back(state.W, state.b);
            break;
        case LayerKind::residual_end:
            state.W += state.skips.back().first;
            state.b += state.skips.back().second;
            state.skips.pop_back();
            break;
        case LayerKind::activation:
            return op;
        }
    }
    return op;
}

class Exhaustive {
public:
    Exhaustive(const Network& net, const Tolerances& tol, std::set<std::string>& out)
        : net_(net), tol_(tol), out_(out)
    {
    }

    void run(std::size_t op, AffineState state, const HPolytope& region, std::string key)
    {
        op = advance(net_, op, state);
        if (op >= net_.layers().size()) {
            out_.insert(std::move(key));
            return;
        }
        const LayerSpec& act = net_.layers()[op];
        const auto width = static_cast<int>(state.W.rows());
        const std::uint64_t combos = std::uint64_t{1} << width;
        for (std::uint64_t mask = 0; mask < combos; ++mask) {
            HPolytope cell = region;
            bool consistent = true;
            Eigen::VectorXd slopes(width);
            std::string bits(static_cast<std::size_t>(width), '0');
            for (int i = 0; i < width && consistent; ++i) {
                const int s = ((mask >> i) & 1u) ? 1 : -1;
                bits[static_cast<std::size_t>(i)] = s > 0 ? '1' : '0';
                slopes(i) = s > 0 ? act.slope_pos : act.slope_neg;
                const double norm = state.W.row(i).norm();
                if (norm <= tol_.eps_zero_normal) {
                    // Constant pre-activation: its sign is decided by the offset alone.
                    consistent = sgn(state.b(i)) == s;
                    continue;
                }
                cell.append(Halfspace{s * state.W.row(i).transpose(), s * state.b(i)}, tol_.eps_zero_normal);
            }
            if (!consistent || !full_dimensional(cell))
                continue;
            AffineState next = state;
            next.W = slopes.asDiagonal() * state.W;
            next.b = slopes.cwiseProduct(state.b);
            run(op + 1, std::move(next), cell, key + bits);
        }
    }

private:
    bool full_dimensional(const HPolytope& cell) const
    {
        if (cell.contradictory())
            return false;
        try {
            return chebyshev_center(cell, tol_).full_dimensional(tol_);
        } catch (const InfeasibleRegion&) {
            return false;
        } catch (const NumericalFailure&) {
            return chebyshev_center(cell, tol_, Pricing::bland).full_dimensional(tol_);
        }
    }

    const Network& net_;
    const Tolerances& tol_;
    std::set<std::string>& out_;
};

} // namespace

const char* to_string(PatternMethod method)
{
    return method == PatternMethod::grid ? "grid" : "exhaustive_lp";
}

PatternSet enumerate_patterns_bruteforce(const Network& net, const HPolytope& a0, const Tolerances& tol)
{
    const int n = net.total_activation_neurons();
    if (n > kMaxOracleNeurons)
        throw CapExceeded("exhaustive oracle supports at most " + std::to_string(kMaxOracleNeurons) +
                          " activation neurons, network has " + std::to_string(n));
    if (a0.dim() != net.input_dim())
        throw StructuralError("oracle: domain dimension does not match network input");
    PatternSet result;
    result.method = PatternMethod::exhaustive_lp;
    AffineState start{Eigen::MatrixXd::Identity(net.input_dim(), net.input_dim()),
                      Eigen::VectorXd::Zero(net.input_dim()),
                      {}};
    Exhaustive(net, tol, result.patterns).run(0, std::move(start), a0, "");
    return result;
}

PatternSet grid_sample_patterns(const Network& net, const HPolytope& a0, int resolution, const Tolerances& tol)
{
    if (resolution < 2)
        throw StructuralError("grid_sample_patterns: resolution must be at least 2");
    if (a0.dim() != net.input_dim())
        throw StructuralError("grid_sample_patterns: domain dimension does not match network input");
    const auto [lo, hi] = bounding_box(a0, tol);
    const int d = a0.dim();
    PatternSet result;
    result.method = PatternMethod::grid;

    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd x(d);
    const int depth = net.activation_layer_count();
    while (true) {
        for (int k = 0; k < d; ++k) {
            const double t = static_cast<double>(idx[static_cast<std::size_t>(k)]) / (resolution - 1);
            x(k) = lo(k) + t * (hi(k) - lo(k));
        }
        if (a0.contains(x, tol.eps_feas))
            result.patterns.insert(sign_pattern(net, x, depth).key());
        int k = 0;
        while (k < d && ++idx[static_cast<std::size_t>(k)] == resolution) {
            idx[static_cast<std::size_t>(k)] = 0;
            ++k;
        }
        if (k == d)
            break;
    }
    return result;
}

std::uint64_t count_cells_bruteforce(const std::vector<Hyperplane>& hyperplanes, const HPolytope& box, const Tolerances& tol)
{
    if (hyperplanes.size() > static_cast<std::size_t>(kMaxOracleNeurons))
        throw CapExceeded("count_cells_bruteforce supports at most " + std::to_string(kMaxOracleNeurons) +
                          " hyperplanes");
    const std::uint64_t combos = std::uint64_t{1} << hyperplanes.size();
    std::uint64_t count = 0;
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
        HPolytope cell = box;
        for (std::size_t i = 0; i < hyperplanes.size(); ++i)
            cell.append(hyperplanes[i].side(((mask >> i) & 1u) ? 1 : -1), tol.eps_zero_normal);
        if (cell.contradictory())
            continue;
        try {
            if (chebyshev_center(cell, tol).full_dimensional(tol))
                ++count;
        } catch (const InfeasibleRegion&) {
        }
    }
    return count;
}

PatternDiff compare_patterns(const std::set<std::string>& oracle, const std::set<std::string>& candidate)
{
    PatternDiff diff;
    std::set_difference(oracle.begin(), oracle.end(), candidate.begin(), candidate.end(),
                        std::back_inserter(diff.missing));
    std::set_difference(candidate.begin(), candidate.end(), oracle.begin(), oracle.end(),
                        std::back_inserter(diff.extra));
    return diff;
}

} // namespace affinelens
