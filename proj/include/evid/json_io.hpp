#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "evid/belief.hpp"
#include "evid/experiment.hpp"
#include "evid/frame.hpp"
#include "evid/metaprob.hpp"

namespace evid::io {

using nlohmann::json;

/// Subsets are keyed by their member labels joined with '+', lexicographically
/// sorted ("1+3", "even+odd"). Labels containing '+' cannot be serialized.
std::string subset_key(const SubsetMask& subset);
SubsetMask parse_subset_key(const Frame& frame, const std::string& key);

/// Frames serialize as plain label arrays.
json frame_to_json(const Frame& frame);
Frame frame_from_json(const json& j);

/// {"frame": [labels], "masses": {"label+label": value, ...}}
json mass_to_json(const MassFunction& m);
MassFunction mass_from_json(const json& j);

/// {"coarse": [labels], "fine": [labels], "images": {coarse_label: [fine_labels]}}
json refining_to_json(const Refining& r);
Refining refining_from_json(const json& j);

/// [{"event": [labels], "successes": n, "trials": n}, ...]
json evidence_to_json(std::span<const EvidenceRecord> evidence);
std::vector<EvidenceRecord> evidence_from_json(const Frame& frame, const json& j);

/// [{"event": [labels], "target": "1/2" | "0.5" | 0.5}, ...]. String targets
/// parse exactly; numeric targets are snapped to a small-denominator rational.
json constraints_to_json(std::span<const LinearConstraint> constraints);
std::vector<LinearConstraint> constraints_from_json(const Frame& frame, const json& j);

/// {"N": n, "d": n, "epsilon": x, "mode": "exact_half" | "simulated",
///  "seed": n, "true_die": [6 values]}; every field optional.
json scenario_to_json(const DieScenario& s);
DieScenario scenario_from_json(const json& j);

/// Support points (weight above 1e-12) with their weights; the grid itself
/// is never serialized and is reconstructed from outcome labels and d.
json meta_to_json(const MetaDistribution& md);
/// CSV rows k_1,...,k_n,weight over the support points.
std::string meta_to_csv(const MetaDistribution& md);

json summary_to_json(const MetaSummary& summary, const SimplexGrid& grid);
json report_to_json(const ComparisonReport& report);

}  // namespace evid::io
