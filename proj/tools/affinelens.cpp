// affinelens: batch front end for region enumeration, verification, rendering and statistics.
//
// Exit codes: 0 ok, 1 verification mismatch, 2 usage or input error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affinelens/analysis.hpp"
#include "affinelens/enumerator.hpp"
#include "affinelens/errors.hpp"
#include "affinelens/network.hpp"
#include "affinelens/oracle.hpp"
#include "affinelens/polytope.hpp"
#include "affinelens/report.hpp"

namespace fs = std::filesystem;
using namespace affinelens;

namespace {

enum Exit { ok = 0, mismatch = 1, usage = 2, numerical = 3 };

struct RunConfig {
    std::string network;
    std::string domain;
    std::vector<double> box;
    std::string seed_point;
    int workers = 1;
    bool strict = false;
    std::string out = ".";
    std::vector<std::string> slice;
    std::optional<double> eps_feas, eps_dim, eps_cross;
};

struct RenderFlags {
    std::string mode = "region_id";
    double band = 0.0;
    std::uint64_t color_seed = 0;
    int size = 800;
};

Eigen::VectorXd parse_csv(const std::string& text, const char* what)
{
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos)
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParseError(std::string(what) + ": cannot parse \"" + item + "\" as a number");
        }
    }
    if (vals.empty())
        throw ParseError(std::string(what) + ": empty list");
    return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

Tolerances tolerances(const RunConfig& cfg)
{
    Tolerances tol = default_tolerances();
    if (cfg.eps_feas)
        tol.eps_feas = *cfg.eps_feas;
    if (cfg.eps_dim)
        tol.eps_dim = *cfg.eps_dim;
    if (cfg.eps_cross)
        tol.eps_cross = *cfg.eps_cross;
    return tol;
}

// The network actually enumerated (sliced when requested) and its domain.
struct Problem {
    Network net;
    HPolytope domain;
    std::string domain_label;
    std::optional<Eigen::VectorXd> seed;
    EnumerationOptions options;
};

Problem load_problem(const RunConfig& cfg)
{
    if (cfg.workers < 1)
        throw ParseError("--workers must be at least 1");
    if (cfg.domain.empty() == cfg.box.empty())
        throw ParseError("exactly one of --domain and --box is required");
    Network net = load_network(cfg.network);

    if (!cfg.slice.empty()) {
        if (cfg.slice.size() != 3)
            throw ParseError("--slice expects BASE DIR1 DIR2");
        net = slice_network(net, parse_csv(cfg.slice[0], "--slice base"), parse_csv(cfg.slice[1], "--slice dir1"),
                            parse_csv(cfg.slice[2], "--slice dir2"));
    }

    HPolytope domain;
    std::string label;
    if (!cfg.box.empty()) {
        if (cfg.box.size() > 2)
            throw ParseError("--box expects D [H]");
        const double dd = cfg.box[0];
        const double h = cfg.box.size() == 2 ? cfg.box[1] : 1.0;
        if (dd < 1 || dd != static_cast<int>(dd))
            throw ParseError("--box dimension must be a positive integer");
        if (!(h > 0.0))
            throw ParseError("--box half-width must be positive");
        // A slice lives in the (t1, t2) plane whatever the original input dimension.
        const int d = cfg.slice.empty() ? static_cast<int>(dd) : 2;
        domain = HPolytope::box(d, h);
        std::ostringstream os;
        os << "box:" << d << ":" << h;
        label = os.str();
    } else {
        domain = load_polytope(cfg.domain);
        label = cfg.domain;
    }
    if (domain.dim() != net.input_dim())
        throw ParseError("domain dimension " + std::to_string(domain.dim()) + " does not match network input " +
                         std::to_string(net.input_dim()));

    std::optional<Eigen::VectorXd> seed;
    if (!cfg.seed_point.empty())
        seed = parse_csv(cfg.seed_point, "--seed-point");

    EnumerationOptions options;
    options.tol = tolerances(cfg);
    options.workers = cfg.workers;
    return Problem{std::move(net), std::move(domain), std::move(label), std::move(seed), options};
}

EnumerationResult run_enumeration(const Problem& p)
{
    EnumerationResult result = find_cpas(p.net, p.domain, p.seed, p.options);
    std::fprintf(stderr, "enumerated %zu regions in %lld ms (%llu LP calls, %llu skipped)\n", result.regions.size(),
                 static_cast<long long>(result.stats.wall_ms), static_cast<unsigned long long>(result.stats.lp_calls),
                 static_cast<unsigned long long>(result.stats.skipped_candidates));
    return result;
}

fs::path output_path(const RunConfig& cfg, const char* name)
{
    fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ParseError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir / name;
}

int strict_exit(const RunConfig& cfg, const EnumerationResult& result)
{
    if (cfg.strict && !result.stats.completeness_verified()) {
        std::fprintf(stderr, "error: %llu candidates skipped; completeness not verified\n",
                     static_cast<unsigned long long>(result.stats.skipped_candidates));
        return Exit::numerical;
    }
    return Exit::ok;
}

int cmd_enumerate(const RunConfig& cfg)
{
    const Problem p = load_problem(cfg);
    const EnumerationResult result = run_enumeration(p);
    const fs::path path = output_path(cfg, "report.json");
    save_text(path, report_to_json(make_report(result, cfg.network, p.domain_label)));
    std::printf("regions: %zu\nreport: %s\n", result.regions.size(), path.string().c_str());
    return strict_exit(cfg, result);
}

int cmd_verify(const RunConfig& cfg, const std::string& report_path, int resolution)
{
    const Problem p = load_problem(cfg);
    EnumerationReport report;
    if (report_path.empty()) {
        const EnumerationResult result = run_enumeration(p);
        report = make_report(result, cfg.network, p.domain_label);
    } else {
        report = load_report(report_path);
    }

    const PatternSet truth = resolution > 0 ? grid_sample_patterns(p.net, p.domain, resolution, p.options.tol)
                                            : enumerate_patterns_bruteforce(p.net, p.domain, p.options.tol);
    const PatternDiff diff = compare_patterns(truth.patterns, report_keys(report));
    OracleBlock block;
    block.method = truth.method;
    block.pattern_count = truth.patterns.size();
    // The grid only under-approximates, so extra keys are not evidence of error there.
    block.match = truth.method == PatternMethod::grid ? diff.missing.empty() : diff.match();
    block.missing = diff.missing;
    block.extra = diff.extra;
    report.oracle = block;

    const fs::path path = output_path(cfg, "report.json");
    save_text(path, report_to_json(report));
    std::printf("oracle: %s, %zu patterns\nmissing: %zu\nextra: %zu\nmatch: %s\n", to_string(block.method),
                block.pattern_count, block.missing.size(), block.extra.size(), block.match ? "true" : "false");
    return block.match ? Exit::ok : Exit::mismatch;
}

int cmd_render(const RunConfig& cfg, const RenderFlags& flags)
{
    RenderSpec spec;
    spec.mode = parse_render_mode(flags.mode);
    spec.band = flags.band;
    spec.color_seed = flags.color_seed;
    spec.width = spec.height = flags.size;
    if (!(spec.band >= 0.0))
        throw ParseError("--band must be non-negative");
    if (flags.size < 1)
        throw ParseError("--size must be positive");

    const Problem p = load_problem(cfg);
    if (p.net.input_dim() != 2)
        throw ParseError("render needs a 2D domain; pass --slice BASE DIR1 DIR2 for higher input dimensions");
    const EnumerationResult result = run_enumeration(p);
    const auto labeled = label_regions(p.net, result);
    const fs::path path = output_path(cfg, "regions.svg");
    save_text(path, render_svg_2d(labeled, spec, p.options.tol));
    std::printf("regions: %zu\nsvg: %s\n", result.regions.size(), path.string().c_str());
    return strict_exit(cfg, result);
}

int cmd_stats(const RunConfig& cfg, const std::string& report_path)
{
    std::vector<std::size_t> counts;
    int code = Exit::ok;
    if (report_path.empty()) {
        const Problem p = load_problem(cfg);
        const EnumerationResult result = run_enumeration(p);
        const RegionSummary s = region_statistics(result);
        counts = s.per_layer_counts;
        std::fprintf(stderr, "radius min %.6g median %.6g max %.6g\n", s.min_radius, s.median_radius, s.max_radius);
        code = strict_exit(cfg, result);
    } else {
        counts = load_report(report_path).per_layer_counts;
    }
    const std::string csv = per_layer_csv(counts);
    save_text(output_path(cfg, "per_layer_counts.csv"), csv);
    std::fputs(csv.c_str(), stdout);
    return code;
}

void add_config_flags(CLI::App* cmd, RunConfig& cfg, bool network_required = true)
{
    auto* net = cmd->add_option("--network", cfg.network, "Network interchange file (JSON)");
    if (network_required)
        net->required();
    cmd->add_option("--domain", cfg.domain, "Domain polytope file (JSON, A x + b >= 0)");
    cmd->add_option("--box", cfg.box, "Box domain [-H, H]^D; H defaults to 1")->expected(1, 2)->type_name("D [H]");
    cmd->add_option("--seed-point", cfg.seed_point, "Comma-separated start point (default: domain Chebyshev center)");
    cmd->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
    cmd->add_flag("--strict", cfg.strict, "Fail when any neighbor candidate was skipped");
    cmd->add_option("--out", cfg.out, "Output directory")->capture_default_str();
    cmd->add_option("--slice", cfg.slice, "Enumerate the 2D slice base + t1*dir1 + t2*dir2 (comma-separated vectors)")
        ->expected(3)
        ->type_name("BASE DIR1 DIR2");
    cmd->add_option("--eps-feas", cfg.eps_feas, "Feasibility tolerance");
    cmd->add_option("--eps-dim", cfg.eps_dim, "Full-dimensionality radius threshold");
    cmd->add_option("--eps-cross", cfg.eps_cross, "Hyperplane crossing margin");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact affine-region enumeration for piecewise-linear networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "affinelens 0.1.0");

    RunConfig cfg;
    RenderFlags render;
    std::string report_path;
    int resolution = 0;

    auto* enumerate = app.add_subcommand("enumerate", "Enumerate all affine regions and write report.json");
    add_config_flags(enumerate, cfg);

    auto* verify = app.add_subcommand("verify", "Compare enumerated sign patterns with the brute-force oracle");
    add_config_flags(verify, cfg);
    verify->add_option("--report", report_path, "Check this report instead of enumerating");
    verify->add_option("--resolution", resolution, "Use an N^d grid-sampling oracle instead of the exhaustive one");

    auto* rend = app.add_subcommand("render", "Render the regions of a 2D (or sliced) domain to regions.svg");
    add_config_flags(rend, cfg);
    rend->add_option("--mode", render.mode, "region_id | class_label | boundary_band")->capture_default_str();
    rend->add_option("--band", render.band, "Half-width of the white decision-boundary band");
    rend->add_option("--color-seed", render.color_seed, "Seed of the region color hash");
    rend->add_option("--size", render.size, "Canvas width and height in pixels")->capture_default_str();

    auto* stats = app.add_subcommand("stats", "Write per-layer region counts to per_layer_counts.csv");
    add_config_flags(stats, cfg, false);
    stats->add_option("--report", report_path, "Read counts from an existing report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::usage;
    }

    try {
        if (*enumerate)
            return cmd_enumerate(cfg);
        if (*verify)
            return cmd_verify(cfg, report_path, resolution);
        if (*rend)
            return cmd_render(cfg, render);
        if (report_path.empty() && cfg.network.empty())
            throw ParseError("stats needs --report or --network");
        return cmd_stats(cfg, report_path);
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return Exit::numerical;
    } catch (const NumericOverflow& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return Exit::numerical;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return Exit::usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return Exit::usage;
    }
}
