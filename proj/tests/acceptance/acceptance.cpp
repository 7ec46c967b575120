// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "affinelens/analysis.hpp"
#include "affinelens/enumerator.hpp"
#include "affinelens/oracle.hpp"
#include "fixtures.hpp"

using namespace affinelens;
using namespace affinelens::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Fixture {
    std::string name;
    Network net;
    HPolytope domain;
    EnumerationResult result;
    double enumerate_s = 0.0;
};

std::set<std::string> keys_of(const EnumerationResult& r)
{
    std::set<std::string> keys;
    for (const auto& reg : r.regions)
        keys.insert(reg.sign_key.key());
    return keys;
}

Fixture make_fixture(std::string name, Network net, HPolytope domain)
{
    Fixture f{std::move(name), std::move(net), std::move(domain), {}, 0.0};
    const auto t0 = Clock::now();
    f.result = find_cpas(f.net, f.domain);
    f.enumerate_s = seconds_since(t0);
    return f;
}

// One ReLU layer whose neurons are exactly `planes`.
Network plane_net(const std::vector<Hyperplane>& planes)
{
    const int m = static_cast<int>(planes.size());
    Eigen::MatrixXd W(m, 2);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        W.row(i) = planes[i].normal.transpose();
        b(i) = planes[i].offset;
    }
    return Network(2, {LayerSpec::dense(W, b), LayerSpec::relu(),
                       LayerSpec::dense(Eigen::MatrixXd::Ones(1, m), Eigen::VectorXd::Zero(1))});
}

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail)
{
    std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

// Exact sign-key match against the exhaustive oracle, within a per-network time budget.
void oracle_equivalence(const std::string& name, const std::vector<Fixture*>& fixtures, double budget_s)
{
    bool pass = true;
    std::size_t missing = 0, extra = 0, regions = 0;
    double worst = 0.0;
    for (Fixture* f : fixtures) {
        const auto t0 = Clock::now();
        const PatternSet oracle = enumerate_patterns_bruteforce(f->net, f->domain);
        const double oracle_s = seconds_since(t0);
        const PatternDiff diff = compare_patterns(oracle.patterns, keys_of(f->result));
        missing += diff.missing.size();
        extra += diff.extra.size();
        regions += f->result.regions.size();
        worst = std::max(worst, f->enumerate_s + oracle_s);
        pass = pass && diff.match() && f->enumerate_s < budget_s && f->result.stats.completeness_verified();
    }
    std::ostringstream os;
    os << fixtures.size() << " nets, " << regions << " regions, missing " << missing << ", extra " << extra
       << ", slowest " << worst << " s (budget " << budget_s << " s)";
    report(pass, name, os.str());
}

} // namespace

int main()
{
    std::vector<Fixture> nets2d, nets3d;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        nets2d.push_back(make_fixture("2d-" + std::to_string(seed), random_mlp(2, {3, 3}, 2, seed), HPolytope::box(2)));
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        nets3d.push_back(
            make_fixture("3d-" + std::to_string(seed), random_mlp(3, {2, 2, 2}, 2, 1000 + seed), HPolytope::box(3)));
    Fixture residual = make_fixture("residual-bn", residual_batchnorm_net(), HPolytope::box(2));
    Fixture wide = make_fixture("width-16", random_mlp(2, {16}, 2, 16), HPolytope::box(2));
    std::vector<Fixture> arrangements;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        arrangements.push_back(
            make_fixture("lines-" + std::to_string(seed), plane_net(random_lines(5, seed)), HPolytope::box(2)));

    std::vector<Fixture*> all, all2d, oracle_fixtures;
    for (auto& f : nets2d) {
        all.push_back(&f);
        all2d.push_back(&f);
        oracle_fixtures.push_back(&f);
    }
    for (auto& f : nets3d) {
        all.push_back(&f);
        oracle_fixtures.push_back(&f);
    }
    for (Fixture* f : {&residual, &wide}) {
        all.push_back(f);
        all2d.push_back(f);
    }
    for (auto& f : arrangements) {
        all.push_back(&f);
        all2d.push_back(&f);
    }

    {
        std::vector<Fixture*> v;
        for (auto& f : nets2d)
            v.push_back(&f);
        oracle_equivalence("oracle-equivalence-2d", v, 10.0);
    }
    {
        std::vector<Fixture*> v;
        for (auto& f : nets3d)
            v.push_back(&f);
        oracle_equivalence("oracle-equivalence-3d", v, 60.0);
    }

    // Forward pass vs the region's effective affine map at the representative and 20 interior points.
    {
        std::mt19937_64 rng(2024);
        std::size_t points = 0, bad = 0;
        double worst = 0.0;
        for (Fixture* f : oracle_fixtures)
            for (const Region& r : f->result.regions) {
                const EffectiveAffine map = effective_affine(f->net, r.representative, f->net.depth());
                for (int k = 0; k <= 20; ++k) {
                    const Eigen::VectorXd x =
                        k == 0 ? r.representative : interior_point(rng, r.representative, r.radius, 0.95);
                    const Eigen::VectorXd y = forward(f->net, x);
                    const double err = (y - map.apply(x)).cwiseAbs().maxCoeff() / (1.0 + y.norm());
                    worst = std::max(worst, err);
                    bad += err > 1e-6;
                    ++points;
                }
            }
        std::ostringstream os;
        os << points << " points, " << bad << " over 1e-6, worst relative error " << worst;
        report(bad == 0, "affine-realization", os.str());
    }

    // 10,000 uniform samples per fixture; points within 1e-6 of any region boundary are excluded.
    {
        std::mt19937_64 rng(4048);
        std::size_t tested = 0, excluded = 0, bad = 0;
        std::vector<Fixture*> fixtures = oracle_fixtures;
        fixtures.push_back(&residual);
        for (Fixture* f : fixtures) {
            const int d = f->net.input_dim();
            for (int s = 0; s < 10000; ++s) {
                const Eigen::VectorXd x = uniform_point(rng, d);
                if (f->domain.min_slack(x) < 1e-6) {
                    ++excluded;
                    continue;
                }
                int inside = 0;
                const Region* owner = nullptr;
                bool near_boundary = false;
                for (const Region& r : f->result.regions) {
                    const double slack = r.polytope.min_slack(x);
                    if (std::abs(slack) <= 1e-6)
                        near_boundary = true;
                    if (slack > 0.0) {
                        ++inside;
                        owner = &r;
                    }
                }
                if (near_boundary) {
                    ++excluded;
                    continue;
                }
                ++tested;
                const std::string key = sign_pattern(f->net, x, f->net.activation_layer_count()).key();
                if (inside != 1 || owner->sign_key.key() != key)
                    ++bad;
            }
        }
        std::ostringstream os;
        os << tested << " samples, " << excluded << " in boundary band, " << bad << " unmatched, match rate "
           << (tested ? 100.0 * static_cast<double>(tested - bad) / static_cast<double>(tested) : 0.0) << "%";
        report(bad == 0 && tested > 0, "partition", os.str());
    }

    // 5 lines in general position crossing pairwise inside the box: 1 + 5 + C(5,2) cells.
    {
        bool pass = true;
        std::ostringstream os;
        for (const auto& f : arrangements) {
            std::vector<Hyperplane> planes;
            const auto& W = f.net.layers()[0].weight;
            const auto& b = f.net.layers()[0].bias;
            for (Eigen::Index i = 0; i < W.rows(); ++i)
                planes.push_back(Hyperplane{W.row(i).transpose(), b(i)});
            const auto brute = count_cells_bruteforce(planes, f.domain);
            pass = pass && f.result.regions.size() == 16 && brute == 16 && cell_bound(5, 2) == 16;
            os << f.name << " " << f.result.regions.size() << "/" << brute << " ";
        }
        os << "(enumerated/brute-force, expected 16)";
        report(pass, "arrangement-golden", os.str());
    }

    {
        std::size_t parents = 0, violations = 0;
        for (const Fixture* f : all)
            for (const ParentRecord& p : f->result.parents) {
                ++parents;
                violations += static_cast<std::uint64_t>(p.children) > cell_bound(p.active, f->net.input_dim());
            }
        std::ostringstream os;
        os << parents << " parents across " << all.size() << " fixtures, " << violations << " violations";
        report(violations == 0, "counting-bound", os.str());
    }

    oracle_equivalence("residual-batchnorm", {&residual}, 10.0);

    {
        bool pass = true;
        std::size_t checked = 0;
        for (const Fixture* f : all) {
            EnumerationOptions opt;
            opt.workers = 8;
            const EnumerationResult many = find_cpas(f->net, f->domain, std::nullopt, opt);
            pass = pass && keys_of(many) == keys_of(f->result) && many.per_layer_counts == f->result.per_layer_counts;
            ++checked;
        }
        report(pass, "determinism-workers-1-vs-8", std::to_string(checked) + " fixtures compared");
    }

    {
        bool pass = true;
        double worst = 0.0;
        for (const Fixture* f : all2d) {
            const std::string svg = render_svg_2d(label_regions(f->net, f->result), RenderSpec{});
            const SvgRegions parsed = parse_svg_regions(svg);
            const double rel = std::abs(parsed.area - 4.0) / 4.0;
            worst = std::max(worst, rel);
            pass = pass && parsed.count == f->result.regions.size() && rel <= 1e-6;
        }
        std::ostringstream os;
        os << all2d.size() << " 2D fixtures, worst relative area error " << worst;
        report(pass, "render-conservation", os.str());
    }

    {
        std::ostringstream os;
        os << wide.result.regions.size() << " regions in " << wide.enumerate_s << " s (budget 5 s)";
        report(wide.enumerate_s < 5.0 && wide.result.stats.completeness_verified(), "throughput-width-16-2d", os.str());
    }

    std::printf("%d failure(s)\n", failures);
    return failures;
}
