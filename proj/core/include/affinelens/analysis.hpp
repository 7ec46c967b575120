#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "affinelens/enumerator.hpp"
#include "affinelens/network.hpp"

namespace affinelens {

struct LabeledRegion {
    Region region;
    /// argmax of the network output at the representative, lowest index on ties.
    int label = 0;
    /// Output map of the network on this region.
    EffectiveAffine output_affine;
};

/// Index of the largest entry; the first one wins ties.
int argmax_lowest(const Eigen::VectorXd& v);

std::vector<LabeledRegion> label_regions(const Network& net, const EnumerationResult& result);

/// {x | (W_i - W_j) x + (b_i - b_j) = 0}: where classes i and j tie inside the region.
Hyperplane decision_boundary(const LabeledRegion& region, int class_i, int class_j);

enum class RenderMode { region_id, class_label, boundary_band };

const char* to_string(RenderMode mode);
RenderMode parse_render_mode(const std::string& name);

struct RenderSpec {
    RenderMode mode = RenderMode::region_id;
    int width = 800;
    int height = 800;
    std::uint64_t color_seed = 0;
    /// Half-width, in output units, of the white band drawn around decision boundaries.
    double band = 0.0;
};

/// SVG 1.1 document with one `class="region"` path per region, drawn in domain
/// coordinates under a single group transform. class_label and boundary_band
/// modes overlay the exact per-region class cells (`class="class-cell"`) and,
/// for boundary_band, white band polygons (`class="band"`).
/// Throws StructuralError when a region is not 2-dimensional.
std::string render_svg_2d(const std::vector<LabeledRegion>& labeled, const RenderSpec& spec, const Tolerances& tol = {});

/// Polygons of each region in the order given, via enumerate_vertices_2d.
std::vector<std::vector<Eigen::Vector2d>> region_polygons(const std::vector<LabeledRegion>& labeled,
                                                          const Tolerances& tol = {});

struct RegionSummary {
    std::vector<std::size_t> per_layer_counts;
    std::size_t total = 0;
    double min_radius = 0.0;
    double median_radius = 0.0;
    double max_radius = 0.0;
    std::uint64_t lp_calls = 0;
    std::uint64_t skipped_candidates = 0;
    std::int64_t wall_ms = 0;
};

RegionSummary region_statistics(const EnumerationResult& result);

/// "layer,count" header followed by one row per activation layer.
std::string per_layer_csv(const std::vector<std::size_t>& per_layer_counts);

} // namespace affinelens
