#include "affinelens/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "affinelens/errors.hpp"

namespace affinelens {

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hex_color(double r, double g, double b)
{
    auto to8 = [](double c) { return static_cast<int>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", to8(r), to8(g), to8(b));
    return buf;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t seed)
{
    std::uint64_t h = 1469598103934665603ull ^ (seed * 0x9e3779b97f4a7c15ull);
    for (unsigned char c : s)
        h = (h ^ c) * 1099511628211ull;
    return h;
}

std::string hashed_color(const std::string& key, std::uint64_t seed)
{
    const std::uint64_t h = fnv1a(key, seed);
    const double hue = static_cast<double>(h % 3600) / 10.0;
    const double sat = 0.45 + 0.35 * static_cast<double>((h >> 16) % 100) / 100.0;
    const double val = 0.70 + 0.25 * static_cast<double>((h >> 32) % 100) / 100.0;
    const double c = val * sat;
    const double hp = hue / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp) % 6) {
    case 0: r = c, g = x; break;
    case 1: r = x, g = c; break;
    case 2: g = c, b = x; break;
    case 3: g = x, b = c; break;
    case 4: r = x, b = c; break;
    default: r = c, b = x; break;
    }
    const double m = val - c;
    return hex_color(r + m, g + m, b + m);
}

const std::array<const char*, 10> kClassPalette = {
    "#e15759", "#4e79a7", "#59a14f", "#f28e2b", "#b07aa1",
    "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac",
};

std::string class_color(int label)
{
    return kClassPalette[static_cast<std::size_t>(label) % kClassPalette.size()];
}

std::string path_data(const std::vector<Eigen::Vector2d>& poly)
{
    std::string d;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        d += i == 0 ? "M " : " L ";
        d += num(poly[i](0));
        d += ' ';
        d += num(poly[i](1));
    }
    d += " Z";
    return d;
}

// Cell of the region where class c is the (weak) argmax of the region's output map.
std::vector<Eigen::Vector2d> class_cell(const std::vector<Eigen::Vector2d>& poly, const EffectiveAffine& out, int c)
{
    std::vector<Eigen::Vector2d> cell = poly;
    for (Eigen::Index j = 0; j < out.W.rows() && !cell.empty(); ++j) {
        if (j == c)
            continue;
        const Eigen::VectorXd n = (out.W.row(c) - out.W.row(j)).transpose();
        cell = clip_polygon(cell, Halfspace{n, out.b(c) - out.b(j)});
    }
    return cell;
}

} // namespace

int argmax_lowest(const Eigen::VectorXd& v)
{
    int best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) > v(best))
            best = static_cast<int>(i);
    return best;
}

std::vector<LabeledRegion> label_regions(const Network& net, const EnumerationResult& result)
{
    std::vector<LabeledRegion> out;
    out.reserve(result.regions.size());
    for (const Region& r : result.regions) {
        LabeledRegion lr;
        lr.region = r;
        lr.label = argmax_lowest(forward(net, r.representative));
        lr.output_affine = effective_affine(net, r.representative, net.depth());
        out.push_back(std::move(lr));
    }
    return out;
}

Hyperplane decision_boundary(const LabeledRegion& region, int class_i, int class_j)
{
    const auto& W = region.output_affine.W;
    const auto& b = region.output_affine.b;
    if (class_i < 0 || class_j < 0 || class_i >= W.rows() || class_j >= W.rows())
        throw StructuralError("decision_boundary: class index out of range");
    return Hyperplane{(W.row(class_i) - W.row(class_j)).transpose(), b(class_i) - b(class_j)};
}

const char* to_string(RenderMode mode)
{
    switch (mode) {
    case RenderMode::region_id: return "region_id";
    case RenderMode::class_label: return "class_label";
    case RenderMode::boundary_band: return "boundary_band";
    }
    return "region_id";
}

RenderMode parse_render_mode(const std::string& name)
{
    if (name == "region_id")
        return RenderMode::region_id;
    if (name == "class_label")
        return RenderMode::class_label;
    if (name == "boundary_band")
        return RenderMode::boundary_band;
    throw ParseError("unknown render mode \"" + name + "\"");
}

std::vector<std::vector<Eigen::Vector2d>> region_polygons(const std::vector<LabeledRegion>& labeled, const Tolerances& tol)
{
    std::vector<std::vector<Eigen::Vector2d>> polys;
    polys.reserve(labeled.size());
    for (const auto& lr : labeled) {
        if (lr.region.polytope.dim() != 2)
            throw StructuralError("render_svg_2d: regions must be 2-dimensional; slice the network first");
        polys.push_back(enumerate_vertices_2d(lr.region.polytope, tol));
    }
    return polys;
}

std::string render_svg_2d(const std::vector<LabeledRegion>& labeled, const RenderSpec& spec, const Tolerances& tol)
{
    if (spec.width <= 0 || spec.height <= 0)
        throw StructuralError("render_svg_2d: canvas size must be positive");
    if (!(spec.band >= 0.0))
        throw StructuralError("render_svg_2d: band must be non-negative");
    const auto polys = region_polygons(labeled, tol);

    Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector2d hi = -lo;
    for (const auto& poly : polys)
        for (const auto& p : poly) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
    if (polys.empty()) {
        lo.setConstant(-1.0);
        hi.setConstant(1.0);
    }
    const double sx = spec.width / std::max(hi(0) - lo(0), 1e-300);
    const double sy = spec.height / std::max(hi(1) - lo(1), 1e-300);
    const double stroke = 0.6 / std::min(sx, sy);

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width << "\" height=\""
        << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\">\n";
    svg << "<title>" << labeled.size() << " affine regions (" << to_string(spec.mode) << ")</title>\n";
    // y axis flipped so the domain reads with x1 to the right and x2 up.
    svg << "<g transform=\"matrix(" << num(sx) << " 0 0 " << num(-sy) << ' ' << num(-lo(0) * sx) << ' '
        << num(hi(1) * sy) << ")\" stroke-linejoin=\"round\">\n";

    for (std::size_t i = 0; i < labeled.size(); ++i) {
        const auto& lr = labeled[i];
        const std::string key = lr.region.sign_key.key();
        const std::string fill =
            spec.mode == RenderMode::region_id ? hashed_color(key, spec.color_seed) : class_color(lr.label);
        svg << "<path class=\"region\" data-key=\"" << key << "\" d=\"" << path_data(polys[i]) << "\" fill=\"" << fill
            << "\" stroke=\"#202020\" stroke-width=\"" << num(stroke) << "\"/>\n";
    }

    if (spec.mode != RenderMode::region_id) {
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            const auto& out = labeled[i].output_affine;
            for (int c = 0; c < out.W.rows(); ++c) {
                if (c == labeled[i].label)
                    continue;
                const auto cell = class_cell(polys[i], out, c);
                if (cell.size() < 3 || std::abs(polygon_area(cell)) <= 0.0)
                    continue;
                svg << "<path class=\"class-cell\" d=\"" << path_data(cell) << "\" fill=\"" << class_color(c)
                    << "\" stroke=\"none\"/>\n";
            }
        }
    }

    if (spec.mode == RenderMode::boundary_band && spec.band > 0.0) {
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            const auto& out = labeled[i].output_affine;
            for (int c = 0; c < out.W.rows(); ++c) {
                const auto cell = class_cell(polys[i], out, c);
                if (cell.size() < 3)
                    continue;
                for (int j = 0; j < out.W.rows(); ++j) {
                    if (j == c)
                        continue;
                    // Inside c's cell the margin to j is >= 0; keep where it is within the band.
                    const Eigen::VectorXd n = (out.W.row(j) - out.W.row(c)).transpose();
                    const auto band = clip_polygon(cell, Halfspace{n, spec.band + out.b(j) - out.b(c)});
                    if (band.size() < 3 || std::abs(polygon_area(band)) <= 0.0)
                        continue;
                    svg << "<path class=\"band\" d=\"" << path_data(band) << "\" fill=\"#ffffff\" stroke=\"none\"/>\n";
                }
            }
        }
    }

    svg << "</g>\n</svg>\n";
    return svg.str();
}

RegionSummary region_statistics(const EnumerationResult& result)
{
    RegionSummary s;
    s.per_layer_counts = result.per_layer_counts;
    s.total = result.regions.size();
    s.lp_calls = result.stats.lp_calls;
    s.skipped_candidates = result.stats.skipped_candidates;
    s.wall_ms = result.stats.wall_ms;
    std::vector<double> radii;
    radii.reserve(result.regions.size());
    for (const auto& r : result.regions)
        radii.push_back(r.radius);
    if (!radii.empty()) {
        std::sort(radii.begin(), radii.end());
        s.min_radius = radii.front();
        s.max_radius = radii.back();
        const std::size_t mid = radii.size() / 2;
        s.median_radius = radii.size() % 2 == 1 ? radii[mid] : 0.5 * (radii[mid - 1] + radii[mid]);
    }
    return s;
}

std::string per_layer_csv(const std::vector<std::size_t>& per_layer_counts)
{
    std::string csv = "layer,count\n";
    for (std::size_t l = 0; l < per_layer_counts.size(); ++l)
        csv += std::to_string(l + 1) + "," + std::to_string(per_layer_counts[l]) + "\n";
    return csv;
}

} // namespace affinelens
