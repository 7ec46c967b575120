#include "affinelens/report.hpp"

#include <json.hpp>

#include "affinelens/errors.hpp"
#include "json_util.hpp"

namespace affinelens {

using nlohmann::json;

EnumerationReport make_report(const EnumerationResult& result, std::string network, std::string domain)
{
    EnumerationReport r;
    r.network = std::move(network);
    r.domain = std::move(domain);
    r.per_layer_counts = result.per_layer_counts;
    r.lp_calls = result.stats.lp_calls;
    r.skipped_candidates = result.stats.skipped_candidates;
    r.wall_ms = result.stats.wall_ms;
    r.summary = region_statistics(result);
    r.regions.reserve(result.regions.size());
    for (const Region& reg : result.regions)
        r.regions.push_back(ReportRegion{reg.sign_key.key(), reg.representative, reg.radius, reg.polytope.A(),
                                         reg.polytope.b()});
    return r;
}

std::set<std::string> report_keys(const EnumerationReport& report)
{
    std::set<std::string> keys;
    for (const auto& r : report.regions)
        keys.insert(r.sign_key);
    return keys;
}

std::string report_to_json(const EnumerationReport& report)
{
    json doc;
    doc["network"] = report.network;
    doc["domain"] = report.domain;
    doc["per_layer_counts"] = report.per_layer_counts;
    json regions = json::array();
    for (const auto& r : report.regions) {
        regions.push_back({{"sign_key", r.sign_key},
                           {"representative", detail::vector_to_json(r.representative)},
                           {"radius", r.radius},
                           {"A", detail::matrix_to_json(r.A)},
                           {"b", detail::vector_to_json(r.b)}});
    }
    doc["regions"] = std::move(regions);
    doc["stats"] = {{"lp_calls", report.lp_calls},
                    {"skipped_candidates", report.skipped_candidates},
                    {"wall_ms", report.wall_ms}};
    if (report.summary) {
        const auto& s = *report.summary;
        doc["summary"] = {{"per_layer_counts", s.per_layer_counts},
                          {"total", s.total},
                          {"min_radius", s.min_radius},
                          {"median_radius", s.median_radius},
                          {"max_radius", s.max_radius},
                          {"lp_calls", s.lp_calls},
                          {"skipped_candidates", s.skipped_candidates},
                          {"wall_ms", s.wall_ms}};
    }
    if (report.oracle) {
        const auto& o = *report.oracle;
        doc["oracle"] = {{"method", to_string(o.method)},
                         {"pattern_count", o.pattern_count},
                         {"match", o.match},
                         {"missing", o.missing},
                         {"extra", o.extra}};
    }
    return doc.dump(2) + "\n";
}

EnumerationReport parse_report_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("report: invalid JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw ParseError("report: document must be an object");
    try {
        EnumerationReport r;
        r.network = doc.value("network", "");
        r.domain = doc.value("domain", "");
        r.per_layer_counts = detail::require(doc, "per_layer_counts", "report").get<std::vector<std::size_t>>();
        const json& regions = detail::require(doc, "regions", "report");
        if (!regions.is_array())
            throw ParseError("report: \"regions\" must be an array");
        for (const auto& reg : regions) {
            ReportRegion rr;
            rr.sign_key = detail::require(reg, "sign_key", "report.region").get<std::string>();
            rr.representative = detail::read_vector(detail::require(reg, "representative", "report.region"),
                                                    "report.region.representative");
            rr.radius = detail::read_number(detail::require(reg, "radius", "report.region"), "report.region.radius");
            rr.A = detail::read_matrix(detail::require(reg, "A", "report.region"), "report.region.A");
            rr.b = detail::read_vector(detail::require(reg, "b", "report.region"), "report.region.b");
            r.regions.push_back(std::move(rr));
        }
        if (auto it = doc.find("stats"); it != doc.end()) {
            r.lp_calls = it->value("lp_calls", std::uint64_t{0});
            r.skipped_candidates = it->value("skipped_candidates", std::uint64_t{0});
            r.wall_ms = it->value("wall_ms", std::int64_t{0});
        }
        if (auto it = doc.find("oracle"); it != doc.end()) {
            OracleBlock o;
            o.method = it->value("method", "exhaustive_lp") == "grid" ? PatternMethod::grid : PatternMethod::exhaustive_lp;
            o.pattern_count = it->value("pattern_count", std::size_t{0});
            o.match = it->value("match", false);
            o.missing = it->value("missing", std::vector<std::string>{});
            o.extra = it->value("extra", std::vector<std::string>{});
            r.oracle = std::move(o);
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
}

EnumerationReport load_report(const std::filesystem::path& path)
{
    return parse_report_json(detail::read_file(path));
}

void save_text(const std::filesystem::path& path, const std::string& content)
{
    detail::write_file(path, content);
}

} // namespace affinelens
