#pragma once

namespace affinelens {

/// Numerical thresholds shared by the LP kernel and the region logic.
///
/// All constraint rows are stored with unit normals, so every threshold is a
/// Euclidean distance in input space.
struct Tolerances {
    /// Constraint satisfaction slack for LP solutions and containment tests.
    double eps_feas = 1e-9;
    /// A region is full-dimensional iff its Chebyshev radius exceeds this.
    double eps_dim = 1e-8;
    /// Sign-straddle margin used when deciding whether a hyperplane cuts a region.
    double eps_cross = 1e-8;
    /// Rows whose normal is shorter than this are treated as constant (zero-normal).
    double eps_zero_normal = 1e-12;
};

/// Default tolerances, with eps_feas overridden by AFFINELENS_EPS_FEAS when set.
Tolerances default_tolerances();

} // namespace affinelens
