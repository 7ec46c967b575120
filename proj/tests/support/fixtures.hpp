#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affinelens/network.hpp"
#include "affinelens/polytope.hpp"

namespace affinelens::testing {

/// Dense/activation stack with weights U(-1, 1) and biases U(-0.5, 0.5).
Network random_mlp(int input_dim, const std::vector<int>& widths, int output_dim, std::uint64_t seed,
                   double negative_slope = 0.0);

/// 2 -> 4, two residual blocks (one with batchnorm), 4 -> 3 head. 12 activation neurons.
Network residual_batchnorm_net();

/// `count` lines through points of [-0.8, 0.8]^2 with pairwise crossings inside the open box.
std::vector<Hyperplane> random_lines(int count, std::uint64_t seed);

/// Uniform point of [lo, hi]^d.
Eigen::VectorXd uniform_point(std::mt19937_64& rng, int d, double lo = -1.0, double hi = 1.0);

/// Full-dimensional point inside a region, at distance <= radius * fraction from its representative.
Eigen::VectorXd interior_point(std::mt19937_64& rng, const Eigen::VectorXd& center, double radius,
                               double fraction = 0.9);

/// Output-relative agreement |a - b| <= tol * max(1, |a|) per coordinate.
bool close_relative(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol);

/// Sum of binomial(m, i) for i = 0..d.
std::uint64_t cell_bound(int m, int d);

struct SvgRegions {
    std::size_t count = 0;
    /// Sum of the absolute shoelace areas of the parsed paths.
    double area = 0.0;
};

/// Reads every `class="region"` path back out of an SVG document.
SvgRegions parse_svg_regions(const std::string& svg);

/// Fresh scratch directory under the system temp path.
std::string scratch_dir(const std::string& name);

} // namespace affinelens::testing
