#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "affinelens/analysis.hpp"
#include "affinelens/enumerator.hpp"
#include "affinelens/oracle.hpp"

namespace affinelens {

struct ReportRegion {
    std::string sign_key;
    Eigen::VectorXd representative;
    double radius = 0.0;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

struct OracleBlock {
    PatternMethod method = PatternMethod::exhaustive_lp;
    std::size_t pattern_count = 0;
    bool match = false;
    std::vector<std::string> missing;
    std::vector<std::string> extra;
};

/// On-disk enumeration report (UTF-8 JSON).
struct EnumerationReport {
    std::string network;
    std::string domain;
    std::vector<std::size_t> per_layer_counts;
    std::vector<ReportRegion> regions;
    std::uint64_t lp_calls = 0;
    std::uint64_t skipped_candidates = 0;
    std::int64_t wall_ms = 0;
    std::optional<RegionSummary> summary;
    std::optional<OracleBlock> oracle;
};

EnumerationReport make_report(const EnumerationResult& result, std::string network, std::string domain);

/// Sign keys of all regions in the report.
std::set<std::string> report_keys(const EnumerationReport& report);

std::string report_to_json(const EnumerationReport& report);
EnumerationReport parse_report_json(std::string_view text);
EnumerationReport load_report(const std::filesystem::path& path);
void save_text(const std::filesystem::path& path, const std::string& content);

} // namespace affinelens
