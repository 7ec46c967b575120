#include "affinelens/enumerator.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_set>
#include <utility>

#include "affinelens/errors.hpp"

namespace affinelens {

namespace {

using Signs = std::vector<std::int8_t>;

struct SignsHash {
    std::size_t operator()(const Signs& s) const noexcept
    {
        std::size_t h = 1469598103934665603ull;
        for (auto v : s)
            h = (h ^ static_cast<std::size_t>(v + 2)) * 1099511628211ull;
        return h;
    }
};

// Runs `op`, retrying once under Bland pricing after a numerical failure.
template <typename Op>
auto with_retry(Op&& op) -> std::optional<decltype(op(Pricing::dantzig))>
{
    try {
        return op(Pricing::dantzig);
    } catch (const NumericalFailure&) {
    }
    try {
        return op(Pricing::bland);
    } catch (const NumericalFailure&) {
    }
    return std::nullopt;
}

HPolytope cell_polytope(const HPolytope& parent, const std::vector<Hyperplane>& planes, const Signs& eta, double eps_zero)
{
    HPolytope p = parent;
    for (std::size_t i = 0; i < planes.size(); ++i)
        p.append(planes[i].side(eta[i]), eps_zero);
    return p;
}

Signs signs_at(const std::vector<Hyperplane>& planes, const Eigen::VectorXd& x)
{
    Signs eta(planes.size());
    for (std::size_t i = 0; i < planes.size(); ++i)
        eta[i] = static_cast<std::int8_t>(sgn(planes[i].eval(x)));
    return eta;
}

// Insert-if-absent set shared by the enumeration workers.
class KeySet {
public:
    bool insert(const std::string& key)
    {
        std::lock_guard lock(mutex_);
        return keys_.insert(key).second;
    }

private:
    std::mutex mutex_;
    std::unordered_set<std::string> keys_;
};

} // namespace

std::uint64_t arrangement_cell_bound(int m, int d)
{
    std::uint64_t total = 0;
    std::uint64_t binom = 1; // C(m, i)
    for (int i = 0; i <= d && i <= m; ++i) {
        total += binom;
        binom = binom * static_cast<std::uint64_t>(m - i) / static_cast<std::uint64_t>(i + 1);
    }
    return total;
}

ActiveSet filter_active_hyperplanes(const Region& parent, const LayerHyperplanes& hyperplanes, const Tolerances& tol)
{
    ActiveSet out;
    out.fixed = hyperplanes.fixed;
    for (const auto& nh : hyperplanes.hyperplanes) {
        const auto crosses = with_retry([&](Pricing pricing) {
            return hyperplane_intersects(parent.polytope, nh.plane, tol, pricing);
        });
        // Undecidable planes are kept: the search treats a non-crossing plane as a single-sided split.
        if (!crosses.has_value() || *crosses)
            out.active.push_back(nh);
        else
            out.fixed.push_back(FixedNeuron{nh.neuron, sgn(nh.plane.eval(parent.representative))});
    }
    return out;
}

SubRegionSearch search_sub_regions(const Region& parent,
                                   const ActiveSet& active,
                                   const Network& net,
                                   int next_layer,
                                   const EnumerationOptions& options)
{
    const Tolerances& tol = options.tol;
    const int width = net.activation_width(next_layer);
    if (!(parent.radius > tol.eps_dim))
        throw DegenerateRegion("search_sub_regions: parent region is not full-dimensional");

    Signs layer_bits(static_cast<std::size_t>(width), -1);
    for (const auto& f : active.fixed)
        layer_bits[static_cast<std::size_t>(f.neuron)] = static_cast<std::int8_t>(f.sign);

    // Neurons sharing one hyperplane (up to orientation) must flip together, so the
    // search runs over distinct planes; group[i] and orient[i] map neuron i back.
    std::vector<Hyperplane> planes;
    std::vector<std::size_t> group(active.active.size());
    std::vector<std::int8_t> orient(active.active.size(), 1);
    for (std::size_t i = 0; i < active.active.size(); ++i) {
        const Hyperplane& h = active.active[i].plane;
        const double norm = h.normal.norm();
        const Hyperplane u{h.normal / norm, h.offset / norm};
        std::size_t g = 0;
        for (; g < planes.size(); ++g) {
            if ((planes[g].normal - u.normal).norm() <= tol.eps_dim && std::abs(planes[g].offset - u.offset) <= tol.eps_dim)
                break;
            if ((planes[g].normal + u.normal).norm() <= tol.eps_dim && std::abs(planes[g].offset + u.offset) <= tol.eps_dim) {
                orient[i] = -1;
                break;
            }
        }
        if (g == planes.size())
            planes.push_back(u);
        group[i] = g;
    }

    SubRegionSearch out;

    auto make_region = [&](const Signs& eta, HPolytope poly, const ChebyshevBall& ball) {
        Region r;
        r.depth = next_layer;
        if (options.remove_redundant) {
            auto reduced = with_retry([&](Pricing pricing) { return remove_redundant(poly, tol, pricing); });
            if (reduced.has_value())
                poly = std::move(*reduced);
        }
        r.polytope = std::move(poly);
        r.representative = ball.center;
        r.radius = ball.radius;
        Signs bits = layer_bits;
        for (std::size_t i = 0; i < active.active.size(); ++i)
            bits[static_cast<std::size_t>(active.active[i].neuron)] = static_cast<std::int8_t>(eta[group[i]] * orient[i]);
        r.sign_key = parent.sign_key;
        r.sign_key.append_layer(bits);
        return r;
    };

    // Chebyshev LP of a candidate cell; nullopt when it is empty or lower-dimensional.
    auto probe = [&](const Signs& eta) -> std::optional<std::pair<HPolytope, ChebyshevBall>> {
        HPolytope poly = cell_polytope(parent.polytope, planes, eta, tol.eps_zero_normal);
        if (poly.contradictory())
            return std::nullopt;
        const auto ball = with_retry([&](Pricing pricing) -> std::optional<ChebyshevBall> {
            try {
                return chebyshev_center(poly, tol, pricing);
            } catch (const InfeasibleRegion&) {
                return std::nullopt;
            }
        });
        if (!ball.has_value()) {
            ++out.skipped_candidates;
            return std::nullopt;
        }
        if (!ball->has_value() || !(*ball)->full_dimensional(tol))
            return std::nullopt;
        return std::make_pair(std::move(poly), **ball);
    };

    // Seed cell: the one holding the parent representative, or a nearby generic point
    // when the representative sits on an intersection of planes.
    std::optional<std::pair<HPolytope, ChebyshevBall>> seed;
    Signs seed_eta = signs_at(planes, parent.representative);
    seed = probe(seed_eta);
    if (!seed.has_value()) {
        std::mt19937_64 rng(0x5eed);
        std::normal_distribution<double> normal;
        for (int attempt = 0; attempt < 64 && !seed.has_value(); ++attempt) {
            Eigen::VectorXd u(net.input_dim());
            for (Eigen::Index k = 0; k < u.size(); ++k)
                u(k) = normal(rng);
            const Eigen::VectorXd x = parent.representative + 0.5 * parent.radius * u.normalized();
            seed_eta = signs_at(planes, x);
            seed = probe(seed_eta);
        }
        if (!seed.has_value())
            throw NumericalFailure("search_sub_regions: no full-dimensional seed cell found");
    }

    std::unordered_set<Signs, SignsHash> tried;
    tried.insert(seed_eta);
    std::deque<std::size_t> queue;
    std::vector<Signs> etas;

    out.regions.push_back(make_region(seed_eta, std::move(seed->first), seed->second));
    etas.push_back(seed_eta);
    queue.push_back(0);

    while (!queue.empty()) {
        const std::size_t idx = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < planes.size(); ++i) {
            Signs eta = etas[idx];
            eta[i] = static_cast<std::int8_t>(-eta[i]);
            if (!tried.insert(eta).second)
                continue;
            auto cell = probe(eta);
            if (!cell.has_value())
                continue;
            out.regions.push_back(make_region(eta, std::move(cell->first), cell->second));
            etas.push_back(std::move(eta));
            queue.push_back(out.regions.size() - 1);
        }
    }
    return out;
}

EnumerationResult find_cpas(const Network& net,
                            const HPolytope& a0,
                            const std::optional<Eigen::VectorXd>& seed,
                            const EnumerationOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    const Tolerances& tol = options.tol;
    if (a0.dim() != net.input_dim())
        throw StructuralError("find_cpas: domain dimension " + std::to_string(a0.dim()) +
                              " does not match network input dimension " + std::to_string(net.input_dim()));
    if (options.workers < 1)
        throw StructuralError("find_cpas: worker count must be at least 1");

    std::atomic<std::uint64_t> lp_calls{0};
    const std::uint64_t lp_before = lp_calls_this_thread();

    const ChebyshevBall domain_ball = chebyshev_center(a0, tol);
    if (!domain_ball.full_dimensional(tol))
        throw DegenerateRegion("find_cpas: domain is not full-dimensional");

    Region root;
    root.depth = 0;
    root.polytope = a0;
    root.radius = domain_ball.radius;
    root.representative = seed.value_or(domain_ball.center);
    if (root.representative.size() != a0.dim())
        throw StructuralError("find_cpas: seed point has the wrong dimension");
    if (!a0.contains(root.representative, tol.eps_feas))
        throw StructuralError("find_cpas: seed point lies outside the domain");

    EnumerationResult result;
    std::vector<Region> level{std::move(root)};
    KeySet seen;
    std::atomic<std::uint64_t> skipped{0};
    std::atomic<std::uint64_t> duplicates{0};

    for (int depth = 1; depth <= net.activation_layer_count(); ++depth) {
        std::vector<std::vector<Region>> children(level.size());
        std::vector<ParentRecord> records(level.size());

        auto expand = [&](std::size_t p) {
            const Region& parent = level[p];
            const LayerHyperplanes hyps = layer_hyperplanes(net, parent.representative, depth, tol);
            const ActiveSet active = filter_active_hyperplanes(parent, hyps, tol);
            SubRegionSearch sub = search_sub_regions(parent, active, net, depth, options);
            skipped += sub.skipped_candidates;
            std::vector<Region> accepted;
            accepted.reserve(sub.regions.size());
            for (auto& r : sub.regions) {
                if (seen.insert(r.sign_key.key()))
                    accepted.push_back(std::move(r));
                else
                    ++duplicates;
            }
            records[p] = ParentRecord{depth, parent.sign_key.key(), static_cast<int>(active.active.size()),
                                      static_cast<int>(accepted.size())};
            children[p] = std::move(accepted);
        };

        const auto workers = static_cast<std::size_t>(options.workers);
        if (workers == 1 || level.size() == 1) {
            for (std::size_t p = 0; p < level.size(); ++p)
                expand(p);
        } else {
            std::atomic<std::size_t> next{0};
            std::exception_ptr failure;
            std::mutex failure_mutex;
            std::vector<std::thread> pool;
            const std::size_t n_threads = std::min(workers, level.size());
            pool.reserve(n_threads);
            for (std::size_t t = 0; t < n_threads; ++t) {
                pool.emplace_back([&] {
                    const std::uint64_t before = lp_calls_this_thread();
                    for (std::size_t p = next++; p < level.size(); p = next++) {
                        try {
                            expand(p);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure)
                                failure = std::current_exception();
                            next = level.size();
                        }
                    }
                    lp_calls += lp_calls_this_thread() - before;
                });
            }
            for (auto& t : pool)
                t.join();
            if (failure)
                std::rethrow_exception(failure);
        }

        std::vector<Region> next_level;
        std::size_t active_total = 0;
        for (std::size_t p = 0; p < level.size(); ++p) {
            active_total += static_cast<std::size_t>(records[p].active);
            for (auto& r : children[p])
                next_level.push_back(std::move(r));
        }
        result.parents.insert(result.parents.end(), records.begin(), records.end());
        result.per_layer_counts.push_back(next_level.size());
        result.active_hyperplane_counts.push_back(active_total);
        level = std::move(next_level);
    }

    result.regions = std::move(level);
    result.stats.lp_calls = lp_calls + (lp_calls_this_thread() - lp_before);
    result.stats.skipped_candidates = skipped;
    result.stats.duplicate_keys = duplicates;
    result.stats.wall_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return result;
}

Network slice_network(const Network& net,
                      const Eigen::VectorXd& base,
                      const Eigen::VectorXd& dir1,
                      const Eigen::VectorXd& dir2)
{
    const int d = net.input_dim();
    if (base.size() != d || dir1.size() != d || dir2.size() != d)
        throw StructuralError("slice_network: base and directions must have length " + std::to_string(d));
    if (!base.allFinite() || !dir1.allFinite() || !dir2.allFinite())
        throw StructuralError("slice_network: non-finite slice parameters");
    const double n1 = dir1.squaredNorm();
    const double n2 = dir2.squaredNorm();
    const double c = dir1.dot(dir2);
    if (!(n1 * n2 - c * c > 1e-12 * n1 * n2) || n1 == 0.0 || n2 == 0.0)
        throw StructuralError("slice_network: slice directions are linearly dependent");

    Eigen::MatrixXd E(d, 2);
    E.col(0) = dir1;
    E.col(1) = dir2;

    std::vector<LayerSpec> layers = net.layers();
    if (layers.front().is_linear_map()) {
        LayerSpec& first = layers.front();
        first.bias = first.weight * base + first.bias;
        first.weight = first.weight * E;
    } else {
        layers.insert(layers.begin(), LayerSpec::dense(E, base));
    }
    return Network(2, std::move(layers));
}

} // namespace affinelens
