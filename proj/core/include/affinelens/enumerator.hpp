#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affinelens/network.hpp"
#include "affinelens/polytope.hpp"
#include "affinelens/tolerances.hpp"

namespace affinelens {

/// A full-dimensional layer-`depth` region of the input domain.
struct Region {
    int depth = 0;
    HPolytope polytope;
    /// Chebyshev center of `polytope` (the seed point for the depth-0 root).
    Eigen::VectorXd representative;
    double radius = 0.0;
    /// Signs of every activation neuron in layers 1..depth.
    SignPattern sign_key;
};

/// Outcome of expanding one parent region by one activation layer.
struct ParentRecord {
    int child_depth = 0;
    std::string parent_key;
    int active = 0;
    int children = 0;
};

struct EnumerationStats {
    std::uint64_t lp_calls = 0;
    /// Neighbor candidates dropped after a failed retry; nonzero means completeness is unverified.
    std::uint64_t skipped_candidates = 0;
    /// Regions rejected by the global insert-if-absent key set (always zero on sound inputs).
    std::uint64_t duplicate_keys = 0;
    std::int64_t wall_ms = 0;

    bool completeness_verified() const { return skipped_candidates == 0; }
};

struct EnumerationResult {
    std::vector<Region> regions;
    /// R_1..R_{L-1}: number of distinct regions after each activation layer.
    std::vector<std::size_t> per_layer_counts;
    /// Sum over parents of the number of active hyperplanes, per activation layer.
    std::vector<std::size_t> active_hyperplane_counts;
    std::vector<ParentRecord> parents;
    EnumerationStats stats;
};

struct EnumerationOptions {
    Tolerances tol;
    int workers = 1;
    bool remove_redundant = true;
};

/// Hyperplanes of one layer split into those that cut the parent and neurons of fixed sign.
struct ActiveSet {
    std::vector<NeuronHyperplane> active;
    std::vector<FixedNeuron> fixed;
};

ActiveSet filter_active_hyperplanes(const Region& parent,
                                    const LayerHyperplanes& hyperplanes,
                                    const Tolerances& tol = {});

struct SubRegionSearch {
    std::vector<Region> regions;
    std::uint64_t skipped_candidates = 0;
};

/// Breadth-first search over the cells of the arrangement of `active.active`
/// inside `parent`, starting from the cell that holds the parent representative.
/// Every active hyperplane is a flip candidate; a candidate is accepted when its
/// Chebyshev radius exceeds eps_dim.
SubRegionSearch search_sub_regions(const Region& parent,
                                   const ActiveSet& active,
                                   const Network& net,
                                   int next_layer,
                                   const EnumerationOptions& options = {});

/// All maximal full-dimensional regions of `net` on `a0`, expanded layer by layer.
/// `seed` defaults to the Chebyshev center of `a0`.
EnumerationResult find_cpas(const Network& net,
                            const HPolytope& a0,
                            const std::optional<Eigen::VectorXd>& seed = std::nullopt,
                            const EnumerationOptions& options = {});

/// Network on R^2 computing net(base + t1*dir1 + t2*dir2).
Network slice_network(const Network& net,
                      const Eigen::VectorXd& base,
                      const Eigen::VectorXd& dir1,
                      const Eigen::VectorXd& dir2);

/// Number of cells a bounded convex set can be cut into by m hyperplanes in R^d.
std::uint64_t arrangement_cell_bound(int m, int d);

} // namespace affinelens
