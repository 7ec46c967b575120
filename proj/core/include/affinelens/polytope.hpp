#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "affinelens/lp.hpp"
#include "affinelens/tolerances.hpp"

namespace affinelens {

/// {x | normal . x + offset >= 0}.
struct Halfspace {
    Eigen::VectorXd normal;
    double offset = 0.0;

    double eval(const Eigen::VectorXd& x) const { return normal.dot(x) + offset; }

    /// A zero normal makes the row a constant: tautology when offset >= 0, contradiction otherwise.
    bool degenerate(double eps_zero_normal = Tolerances{}.eps_zero_normal) const
    {
        return normal.norm() <= eps_zero_normal;
    }

    /// Same halfspace with a unit normal. Degenerate rows are returned unchanged.
    Halfspace normalized(double eps_zero_normal = Tolerances{}.eps_zero_normal) const;
};

/// {x | normal . x + offset = 0}.
struct Hyperplane {
    Eigen::VectorXd normal;
    double offset = 0.0;

    double eval(const Eigen::VectorXd& x) const { return normal.dot(x) + offset; }

    /// The side where normal . x + offset >= 0 (sign > 0) or <= 0 (sign < 0).
    Halfspace side(int sign) const
    {
        return sign > 0 ? Halfspace{normal, offset} : Halfspace{-normal, -offset};
    }
};

/// Bounded-or-not convex polyhedron in H-representation: every row reads A_i x + b_i >= 0.
///
/// Rows are stored with unit normals. Zero-normal rows never enter the row list:
/// tautologies are dropped and contradictions mark the polytope as trivially empty.
class HPolytope {
public:
    explicit HPolytope(int dim = 0);
    HPolytope(int dim, const std::vector<Halfspace>& halfspaces);

    /// Builds {x | A x + b >= 0}. Rejects mismatched sizes and non-finite entries.
    static HPolytope from_matrix(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

    /// [-half_width, half_width]^dim.
    static HPolytope box(int dim, double half_width = 1.0);

    /// Axis-aligned box [lower, upper].
    static HPolytope box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

    int dim() const { return dim_; }
    std::size_t size() const { return halfspaces_.size(); }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
    const Halfspace& operator[](std::size_t i) const { return halfspaces_[i]; }

    /// True when a zero-normal row with negative offset was added.
    bool contradictory() const { return contradictory_; }

    Eigen::MatrixXd A() const;
    Eigen::VectorXd b() const;

    /// Smallest row value A_i x + b_i (+inf for an empty row list).
    double min_slack(const Eigen::VectorXd& x) const;
    bool contains(const Eigen::VectorXd& x, double eps = Tolerances{}.eps_feas) const;

    /// Appends in place; see add_halfspace for the value-returning form.
    void append(const Halfspace& h, double eps_zero_normal = Tolerances{}.eps_zero_normal);

private:
    int dim_;
    std::vector<Halfspace> halfspaces_;
    bool contradictory_ = false;
};

struct ChebyshevBall {
    Eigen::VectorXd center;
    /// Clamped at zero; compare against eps_dim for full-dimensionality.
    double radius = 0.0;

    bool full_dimensional(const Tolerances& tol = {}) const { return radius > tol.eps_dim; }
};

LPSolution solve_lp(const Eigen::VectorXd& objective,
                    const HPolytope& polytope,
                    Sense sense,
                    const Tolerances& tol = {},
                    Pricing pricing = Pricing::dantzig);

bool is_feasible(const HPolytope& polytope, const Tolerances& tol = {});

/// Largest inscribed ball via one LP over (x, r). Throws InfeasibleRegion when
/// the polytope is empty and StructuralError when it is unbounded.
ChebyshevBall chebyshev_center(const HPolytope& polytope,
                               const Tolerances& tol = {},
                               Pricing pricing = Pricing::dantzig);

/// True iff h separates interior points of the polytope: the unit-normal signed
/// distance to h ranges past eps_cross on both sides. A plane that only touches
/// the boundary (within eps_cross) leaves the neuron fixed-sign on the region.
bool hyperplane_intersects(const HPolytope& polytope,
                           const Hyperplane& h,
                           const Tolerances& tol = {},
                           Pricing pricing = Pricing::dantzig);

HPolytope add_halfspace(const HPolytope& polytope, const Halfspace& h, const Tolerances& tol = {});

/// Drops rows implied by the remaining ones. Rows are tested in order against
/// the rows still kept, so the point set is unchanged.
HPolytope remove_redundant(const HPolytope& polytope,
                           const Tolerances& tol = {},
                           Pricing pricing = Pricing::dantzig);

/// Counter-clockwise polygon vertices of a bounded, full-dimensional 2D polytope.
/// Throws DegenerateRegion when the Chebyshev radius is <= eps_dim.
std::vector<Eigen::Vector2d> enumerate_vertices_2d(const HPolytope& polytope, const Tolerances& tol = {});

/// Signed shoelace area (positive for CCW input).
double polygon_area(const std::vector<Eigen::Vector2d>& vertices);

/// Clips a convex polygon by one halfspace (Sutherland-Hodgman step).
std::vector<Eigen::Vector2d> clip_polygon(const std::vector<Eigen::Vector2d>& polygon, const Halfspace& h);

/// Per-coordinate [min, max] of the polytope, one LP pair per axis.
std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(const HPolytope& polytope, const Tolerances& tol = {});

// Interchange: {"dim": int, "A": [[...]], "b": [...]} meaning A x + b >= 0.
HPolytope parse_polytope_json(std::string_view text);
HPolytope load_polytope(const std::filesystem::path& path);
std::string polytope_to_json(const HPolytope& polytope);

} // namespace affinelens
