#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "affinelens/network.hpp"
#include "affinelens/polytope.hpp"
#include "affinelens/tolerances.hpp"

namespace affinelens {

/// Exhaustive pattern checks cost up to 2^N LPs; N is capped here.
inline constexpr int kMaxOracleNeurons = 20;

enum class PatternMethod { exhaustive_lp, grid };

const char* to_string(PatternMethod method);

/// Set of full sign keys (see SignPattern::key) observed by one ground-truth method.
struct PatternSet {
    std::set<std::string> patterns;
    PatternMethod method = PatternMethod::exhaustive_lp;
};

/// Every sign vector over all activation neurons whose region in `a0` has
/// Chebyshev radius > eps_dim. Slopes are fixed from the candidate bits
/// themselves, never from a reference point. Prefixes that are already
/// lower-dimensional are pruned layer by layer, which cannot drop a valid
/// pattern since deeper constraints only shrink the region.
///
/// Throws CapExceeded when the network has more than kMaxOracleNeurons neurons.
PatternSet enumerate_patterns_bruteforce(const Network& net, const HPolytope& a0, const Tolerances& tol = {});

/// Sign keys observed on a resolution^d lattice over the bounding box of `a0`
/// (points outside `a0` skipped). A lower bound on the true set.
PatternSet grid_sample_patterns(const Network& net, const HPolytope& a0, int resolution, const Tolerances& tol = {});

/// Number of sidedness vectors over `hyperplanes` whose cell inside `box` is full-dimensional.
std::uint64_t count_cells_bruteforce(const std::vector<Hyperplane>& hyperplanes,
                                     const HPolytope& box,
                                     const Tolerances& tol = {});

struct PatternDiff {
    /// In the oracle set, absent from the candidate set.
    std::vector<std::string> missing;
    /// In the candidate set, absent from the oracle set.
    std::vector<std::string> extra;

    bool match() const { return missing.empty() && extra.empty(); }
};

PatternDiff compare_patterns(const std::set<std::string>& oracle, const std::set<std::string>& candidate);

} // namespace affinelens
