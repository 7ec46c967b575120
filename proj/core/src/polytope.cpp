#include "affinelens/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "affinelens/errors.hpp"

namespace affinelens {

namespace {

LpOptions lp_options(const Tolerances& tol, Pricing pricing)
{
    return LpOptions{.eps_feas = tol.eps_feas, .bland_only = pricing == Pricing::bland};
}

} // namespace

Tolerances default_tolerances()
{
    Tolerances tol;
    if (const char* env = std::getenv("AFFINELENS_EPS_FEAS")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && std::isfinite(v) && v > 0.0)
            tol.eps_feas = v;
    }
    return tol;
}

Halfspace Halfspace::normalized(double eps_zero_normal) const
{
    const double n = normal.norm();
    if (n <= eps_zero_normal)
        return *this;
    return Halfspace{normal / n, offset / n};
}

HPolytope::HPolytope(int dim) : dim_(dim)
{
    if (dim < 0)
        throw StructuralError("polytope dimension must be non-negative");
}

HPolytope::HPolytope(int dim, const std::vector<Halfspace>& halfspaces) : HPolytope(dim)
{
    halfspaces_.reserve(halfspaces.size());
    for (const auto& h : halfspaces)
        append(h);
}

HPolytope HPolytope::from_matrix(const Eigen::MatrixXd& A, const Eigen::VectorXd& b)
{
    if (A.rows() != b.size())
        throw StructuralError("polytope: A has " + std::to_string(A.rows()) + " rows but b has " +
                              std::to_string(b.size()) + " entries");
    if (!A.allFinite() || !b.allFinite())
        throw StructuralError("polytope: non-finite constraint data");
    HPolytope p(static_cast<int>(A.cols()));
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        p.append(Halfspace{A.row(i).transpose(), b(i)});
    return p;
}

HPolytope HPolytope::box(int dim, double half_width)
{
    if (dim <= 0)
        throw StructuralError("box dimension must be positive");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw StructuralError("box half-width must be positive and finite");
    return box(Eigen::VectorXd::Constant(dim, -half_width), Eigen::VectorXd::Constant(dim, half_width));
}

HPolytope HPolytope::box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper)
{
    if (lower.size() != upper.size() || lower.size() == 0)
        throw StructuralError("box bounds must be non-empty and of equal length");
    const int d = static_cast<int>(lower.size());
    HPolytope p(d);
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e(i) = 1.0;
        p.append(Halfspace{e, -lower(i)});
        p.append(Halfspace{-e, upper(i)});
    }
    return p;
}

void HPolytope::append(const Halfspace& h, double eps_zero_normal)
{
    if (h.normal.size() != dim_)
        throw StructuralError("halfspace normal has length " + std::to_string(h.normal.size()) +
                              ", polytope dimension is " + std::to_string(dim_));
    if (!h.normal.allFinite() || !std::isfinite(h.offset))
        throw StructuralError("halfspace has non-finite coefficients");
    if (h.degenerate(eps_zero_normal)) {
        if (h.offset < 0.0)
            contradictory_ = true;
        return;
    }
    halfspaces_.push_back(h.normalized(eps_zero_normal));
}

Eigen::MatrixXd HPolytope::A() const
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(halfspaces_.size()), dim_);
    for (std::size_t i = 0; i < halfspaces_.size(); ++i)
        m.row(static_cast<Eigen::Index>(i)) = halfspaces_[i].normal.transpose();
    return m;
}

Eigen::VectorXd HPolytope::b() const
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(halfspaces_.size()));
    for (std::size_t i = 0; i < halfspaces_.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = halfspaces_[i].offset;
    return v;
}

double HPolytope::min_slack(const Eigen::VectorXd& x) const
{
    double s = std::numeric_limits<double>::infinity();
    for (const auto& h : halfspaces_)
        s = std::min(s, h.eval(x));
    return s;
}

bool HPolytope::contains(const Eigen::VectorXd& x, double eps) const
{
    return !contradictory_ && min_slack(x) >= -eps;
}

LPSolution solve_lp(const Eigen::VectorXd& objective,
                    const HPolytope& polytope,
                    Sense sense,
                    const Tolerances& tol,
                    Pricing pricing)
{
    if (objective.size() != polytope.dim())
        throw StructuralError("solve_lp: objective length does not match polytope dimension");
    if (polytope.contradictory())
        return LPSolution{LpStatus::infeasible, std::nullopt, std::nullopt};
    return solve_dense_lp(polytope.A(), polytope.b(), objective, sense, lp_options(tol, pricing));
}

bool is_feasible(const HPolytope& polytope, const Tolerances& tol)
{
    return solve_lp(Eigen::VectorXd::Zero(polytope.dim()), polytope, Sense::minimize, tol).optimal();
}

ChebyshevBall chebyshev_center(const HPolytope& polytope, const Tolerances& tol, Pricing pricing)
{
    if (polytope.contradictory())
        throw InfeasibleRegion("chebyshev_center: polytope contains a contradictory constraint");
    const int d = polytope.dim();
    const auto m = static_cast<Eigen::Index>(polytope.size());
    // Rows: a_i . x + b_i - r >= 0 (unit normals), r free so the LP is always feasible.
    Eigen::MatrixXd A(m, d + 1);
    A.leftCols(d) = polytope.A();
    A.col(d).setConstant(-1.0);
    Eigen::VectorXd objective = Eigen::VectorXd::Zero(d + 1);
    objective(d) = 1.0;
    const LPSolution sol =
        solve_dense_lp(A, polytope.b(), objective, Sense::maximize, lp_options(tol, pricing));
    if (sol.status == LpStatus::unbounded)
        throw StructuralError("chebyshev_center: polytope is unbounded");
    if (!sol.optimal())
        throw NumericalFailure("chebyshev_center: relaxed LP reported infeasible");
    const double r = (*sol.point)(d);
    if (r < -tol.eps_feas)
        throw InfeasibleRegion("chebyshev_center: polytope is empty");
    return ChebyshevBall{sol.point->head(d), std::max(r, 0.0)};
}

bool hyperplane_intersects(const HPolytope& polytope, const Hyperplane& h, const Tolerances& tol, Pricing pricing)
{
    if (h.normal.size() != polytope.dim())
        throw StructuralError("hyperplane_intersects: dimension mismatch");
    const double n = h.normal.norm();
    if (n <= tol.eps_zero_normal)
        return false;
    const Eigen::VectorXd dir = h.normal / n;
    const double off = h.offset / n;

    const LPSolution hi = solve_lp(dir, polytope, Sense::maximize, tol, pricing);
    if (hi.status == LpStatus::infeasible)
        return false;
    if (hi.status == LpStatus::optimal && *hi.objective + off <= tol.eps_cross)
        return false;
    const LPSolution lo = solve_lp(dir, polytope, Sense::minimize, tol, pricing);
    if (lo.status == LpStatus::infeasible)
        return false;
    if (lo.status == LpStatus::optimal && *lo.objective + off >= -tol.eps_cross)
        return false;
    return true;
}

HPolytope add_halfspace(const HPolytope& polytope, const Halfspace& h, const Tolerances& tol)
{
    HPolytope out = polytope;
    out.append(h, tol.eps_zero_normal);
    return out;
}

HPolytope remove_redundant(const HPolytope& polytope, const Tolerances& tol, Pricing pricing)
{
    const auto& rows = polytope.halfspaces();
    std::vector<bool> keep(rows.size(), true);
    const LpOptions options = lp_options(tol, pricing);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Eigen::Index others = 0;
        for (std::size_t j = 0; j < rows.size(); ++j)
            others += (j != i && keep[j]) ? 1 : 0;
        Eigen::MatrixXd A(others, polytope.dim());
        Eigen::VectorXd b(others);
        Eigen::Index r = 0;
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (j == i || !keep[j])
                continue;
            A.row(r) = rows[j].normal.transpose();
            b(r) = rows[j].offset;
            ++r;
        }
        // Most negative value of row i over the others; >= 0 means row i is implied.
        const LPSolution sol = solve_dense_lp(A, b, rows[i].normal, Sense::minimize, options);
        if (sol.optimal() && *sol.objective + rows[i].offset >= -tol.eps_feas)
            keep[i] = false;
    }
    std::vector<Halfspace> kept;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (keep[i])
            kept.push_back(rows[i]);
    HPolytope out(polytope.dim(), kept);
    if (polytope.contradictory())
        out.append(Halfspace{Eigen::VectorXd::Zero(polytope.dim()), -1.0});
    return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> bounding_box(const HPolytope& polytope, const Tolerances& tol)
{
    const int d = polytope.dim();
    Eigen::VectorXd lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e(i) = 1.0;
        const LPSolution a = solve_lp(e, polytope, Sense::minimize, tol);
        const LPSolution z = solve_lp(e, polytope, Sense::maximize, tol);
        if (a.status == LpStatus::infeasible || z.status == LpStatus::infeasible)
            throw InfeasibleRegion("bounding_box: polytope is empty");
        if (!a.optimal() || !z.optimal())
            throw StructuralError("bounding_box: polytope is unbounded");
        lo(i) = *a.objective;
        hi(i) = *z.objective;
    }
    return {lo, hi};
}

std::vector<Eigen::Vector2d> clip_polygon(const std::vector<Eigen::Vector2d>& polygon, const Halfspace& h)
{
    std::vector<Eigen::Vector2d> out;
    const std::size_t n = polygon.size();
    if (n == 0)
        return out;
    out.reserve(n + 1);
    auto value = [&](const Eigen::Vector2d& p) { return h.normal(0) * p(0) + h.normal(1) * p(1) + h.offset; };
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector2d& cur = polygon[i];
        const Eigen::Vector2d& nxt = polygon[(i + 1) % n];
        const double vc = value(cur);
        const double vn = value(nxt);
        if (vc >= 0.0)
            out.push_back(cur);
        if ((vc >= 0.0) != (vn >= 0.0)) {
            const double t = vc / (vc - vn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

double polygon_area(const std::vector<Eigen::Vector2d>& vertices)
{
    double twice = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = vertices[i];
        const auto& q = vertices[(i + 1) % n];
        twice += p(0) * q(1) - q(0) * p(1);
    }
    return 0.5 * twice;
}

std::vector<Eigen::Vector2d> enumerate_vertices_2d(const HPolytope& polytope, const Tolerances& tol)
{
    if (polytope.dim() != 2)
        throw StructuralError("enumerate_vertices_2d: polytope must be 2-dimensional");
    const ChebyshevBall ball = chebyshev_center(polytope, tol);
    if (!ball.full_dimensional(tol))
        throw DegenerateRegion("enumerate_vertices_2d: region is not full-dimensional");

    auto [lo, hi] = bounding_box(polytope, tol);
    const double pad = 1.0 + (hi - lo).maxCoeff();
    std::vector<Eigen::Vector2d> poly = {
        {lo(0) - pad, lo(1) - pad},
        {hi(0) + pad, lo(1) - pad},
        {hi(0) + pad, hi(1) + pad},
        {lo(0) - pad, hi(1) + pad},
    };
    for (const auto& h : polytope.halfspaces())
        poly = clip_polygon(poly, h);

    // Collapse near-coincident vertices produced by redundant or concurrent rows.
    const double merge = 1e-12 * (1.0 + (hi - lo).maxCoeff());
    std::vector<Eigen::Vector2d> out;
    for (const auto& p : poly) {
        if (!out.empty() && (p - out.back()).norm() <= merge)
            continue;
        out.push_back(p);
    }
    while (out.size() > 1 && (out.front() - out.back()).norm() <= merge)
        out.pop_back();
    if (polygon_area(out) < 0.0)
        std::reverse(out.begin(), out.end());
    return out;
}

} // namespace affinelens
