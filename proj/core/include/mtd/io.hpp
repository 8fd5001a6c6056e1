#pragma once

#include "mtd/domain.hpp"
#include "mtd/environment.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mtd {

/// Domain document:
///   { "factors": [{"name", "values"}...],
///     "attacker_types": [{"id", "unknown", "mu": {label: x}, "loss": {label: x}}...],
///     "switching_cost": {state-label: {action-label: x}},
///     "M": x, "gamma": x, "alpha": x (optional, default 1) }
/// Configurations missing from a type's mu/loss maps get 0. Every
/// (state, action) pair must appear in switching_cost.
DomainInfo domain_from_json(const std::string& text);
std::string domain_to_json(const DomainInfo& domain);

/// { "T": n, "phases": [{"start", "end", "mode": "static_dist"|"most_adverse",
///   "dist": {type: p}, "per_state_dist": {state-label: {type: p}}}...] }
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);

std::string read_text_file(const std::filesystem::path& path);

struct CvssRow {
    std::string config_label;
    std::string attacker_type;
    double exploitability;
    double impact;
};

/// CSV with header config_label,attacker_type,ES,IS (any column order).
std::vector<CvssRow> parse_cvss_csv(std::istream& in);

/// Per (config_label, attacker_type): averages of 0.1 * ES and 10 * IS over its rows.
std::map<std::pair<std::string, std::string>, CvssParams> aggregate_cvss(const std::vector<CvssRow>& rows);

/// One attacker type per distinct type id in the rows, in first-appearance
/// order; configurations without rows get mu = loss = 0. The id equal to
/// `unknown_id` (if any) is flagged as the unknown type.
std::vector<AttackerTypeSpec> attacker_types_from_cvss(const ConfigSpace& space, const std::vector<CvssRow>& rows,
                                                       const std::string& unknown_id = "unknown");

}  // namespace mtd
