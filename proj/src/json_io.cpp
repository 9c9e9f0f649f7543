#include "evid/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace evid::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

const json& require(const json& j, const char* key) {
    if (!j.is_object()) fail(std::string("expected an object with a '") + key + "' field");
    auto it = j.find(key);
    if (it == j.end()) fail(std::string("missing field '") + key + "'");
    return *it;
}

std::vector<std::string> string_array(const json& j, const char* what) {
    if (!j.is_array()) fail(std::string(what) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& item : j) {
        if (!item.is_string()) fail(std::string(what) + " must be an array of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::string format_weight(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Exact rational from "p/q" or a decimal string; decimal digits scale the
/// denominator by powers of ten, so "0.5" parses as exactly 1/2.
std::pair<long long, long long> rational_from_string(const std::string& text) {
    if (auto slash = text.find('/'); slash != std::string::npos) {
        const long long num = std::stoll(text.substr(0, slash));
        const long long den = std::stoll(text.substr(slash + 1));
        return {num, den};
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return {std::stoll(text), 1};
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    long long den = 1;
    for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
    return {std::stoll(digits), den};
}

std::pair<long long, long long> rational_from_double(double x) {
    for (long long den = 1; den <= 1'000'000; ++den) {
        const double scaled = x * static_cast<double>(den);
        const double nearest = std::round(scaled);
        if (std::abs(scaled - nearest) <= 1e-9 * static_cast<double>(den))
            return {static_cast<long long>(nearest), den};
    }
    fail("constraint target is not a recognizable rational");
}

std::pair<long long, long long> reduced(std::pair<long long, long long> r) {
    const long long g = std::gcd(r.first, r.second);
    return g > 1 ? std::pair{r.first / g, r.second / g} : r;
}

}  // namespace

std::string subset_key(const SubsetMask& subset) {
    std::vector<std::string> labels = subset.member_labels();
    for (const auto& label : labels)
        if (label.find('+') != std::string::npos)
            fail("subset keys cannot contain labels with '+': '" + label + "'");
    std::sort(labels.begin(), labels.end());
    std::string key;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) key += '+';
        key += labels[i];
    }
    return key;
}

SubsetMask parse_subset_key(const Frame& frame, const std::string& key) {
    std::uint64_t bits = 0;
    std::size_t start = 0;
    while (start <= key.size() && !key.empty()) {
        const std::size_t stop = key.find('+', start);
        const std::string label =
            key.substr(start, stop == std::string::npos ? key.size() - start : stop - start);
        bits |= std::uint64_t{1} << frame.index_of(label);
        if (stop == std::string::npos) break;
        start = stop + 1;
    }
    return SubsetMask(frame, bits);
}

json frame_to_json(const Frame& frame) { return json(frame.labels()); }

Frame frame_from_json(const json& j) { return Frame(string_array(j, "frame")); }

json mass_to_json(const MassFunction& m) {
    json masses = json::object();
    for (const auto& [bits, value] : m.entries())
        masses[subset_key(SubsetMask(m.frame(), bits))] = value;
    return json{{"frame", frame_to_json(m.frame())}, {"masses", masses}};
}

MassFunction mass_from_json(const json& j) {
    const Frame frame = frame_from_json(require(j, "frame"));
    const json& masses = require(j, "masses");
    if (!masses.is_object()) fail("'masses' must be an object");
    std::vector<std::pair<SubsetMask, double>> raw;
    for (const auto& [key, value] : masses.items()) {
        if (!value.is_number()) fail("mass of '" + key + "' must be a number");
        raw.emplace_back(parse_subset_key(frame, key), value.get<double>());
    }
    return MassFunction::validate(frame, raw);
}

json refining_to_json(const Refining& r) {
    json images = json::object();
    for (std::size_t i = 0; i < r.coarse().size(); ++i)
        images[r.coarse().label(i)] = r.image(i).member_labels();
    return json{{"coarse", frame_to_json(r.coarse())},
                {"fine", frame_to_json(r.fine())},
                {"images", images}};
}

Refining refining_from_json(const json& j) {
    const Frame coarse = Frame(string_array(require(j, "coarse"), "coarse"));
    const Frame fine = Frame(string_array(require(j, "fine"), "fine"));
    const json& images = require(j, "images");
    if (!images.is_object()) fail("'images' must map coarse labels to fine label arrays");
    std::vector<SubsetMask> masks;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const std::string& label = coarse.label(i);
        auto it = images.find(label);
        if (it == images.end()) fail("missing image for coarse outcome '" + label + "'");
        const auto members = string_array(*it, "image");
        masks.push_back(fine.subset(members));
    }
    return Refining(coarse, fine, std::move(masks));
}

json evidence_to_json(std::span<const EvidenceRecord> evidence) {
    json out = json::array();
    for (const auto& record : evidence)
        out.push_back(json{{"event", record.event.member_labels()},
                           {"successes", record.successes},
                           {"trials", record.trials}});
    return out;
}

std::vector<EvidenceRecord> evidence_from_json(const Frame& frame, const json& j) {
    if (!j.is_array()) fail("evidence must be an array of records");
    std::vector<EvidenceRecord> out;
    for (const auto& item : j) {
        const auto members = string_array(require(item, "event"), "event");
        const auto& successes = require(item, "successes");
        const auto& trials = require(item, "trials");
        if (!successes.is_number_unsigned() || !trials.is_number_unsigned())
            fail("evidence counts must be non-negative integers");
        out.emplace_back(frame.subset(members), successes.get<std::uint64_t>(),
                         trials.get<std::uint64_t>());
    }
    return out;
}

json constraints_to_json(std::span<const LinearConstraint> constraints) {
    json out = json::array();
    for (const auto& c : constraints)
        out.push_back(json{{"event", c.subset.member_labels()},
                           {"target", std::to_string(c.num) + "/" + std::to_string(c.den)}});
    return out;
}

std::vector<LinearConstraint> constraints_from_json(const Frame& frame, const json& j) {
    if (!j.is_array()) fail("constraints must be an array");
    std::vector<LinearConstraint> out;
    for (const auto& item : j) {
        const auto members = string_array(require(item, "event"), "event");
        const json& target = require(item, "target");
        std::pair<long long, long long> r;
        if (target.is_string())
            r = rational_from_string(target.get<std::string>());
        else if (target.is_number())
            r = rational_from_double(target.get<double>());
        else
            fail("constraint target must be a number or a fraction string");
        r = reduced(r);
        out.emplace_back(frame.subset(members), r.first, r.second);
    }
    return out;
}

json scenario_to_json(const DieScenario& s) {
    json j{{"N", s.trials},
           {"d", s.denominator},
           {"mode", s.mode == TossMode::exact_half ? "exact_half" : "simulated"},
           {"seed", s.seed},
           {"true_die", s.true_die}};
    if (s.epsilon) j["epsilon"] = *s.epsilon;
    return j;
}

DieScenario scenario_from_json(const json& j) {
    if (!j.is_object()) fail("scenario must be an object");
    DieScenario s;
    if (auto it = j.find("N"); it != j.end()) s.trials = it->get<std::uint64_t>();
    if (auto it = j.find("d"); it != j.end()) s.denominator = it->get<int>();
    if (auto it = j.find("epsilon"); it != j.end() && !it->is_null())
        s.epsilon = it->get<double>();
    if (auto it = j.find("seed"); it != j.end()) s.seed = it->get<std::uint64_t>();
    if (auto it = j.find("mode"); it != j.end()) {
        const std::string mode = it->get<std::string>();
        if (mode == "exact_half")
            s.mode = TossMode::exact_half;
        else if (mode == "simulated")
            s.mode = TossMode::simulated;
        else
            fail("mode must be 'exact_half' or 'simulated'");
    }
    if (auto it = j.find("true_die"); it != j.end()) {
        const auto values = it->get<std::vector<double>>();
        if (values.size() != 6) fail("true_die must list six face probabilities");
        std::copy(values.begin(), values.end(), s.true_die.begin());
    }
    s.validate();
    return s;
}

json meta_to_json(const MetaDistribution& md) {
    const SimplexGrid& grid = md.grid();
    json points = json::array();
    for (std::size_t i = 0; i < grid.point_count(); ++i) {
        if (md.weight(i) <= weight_epsilon) continue;  // support points only
        const auto p = grid.point(i);
        points.push_back(json{{"counts", std::vector<int>(p.begin(), p.end())},
                              {"weight", md.weight(i)}});
    }
    return json{{"outcomes", frame_to_json(grid.outcomes())},
                {"d", grid.denominator()},
                {"points", points}};
}

std::string meta_to_csv(const MetaDistribution& md) {
    const SimplexGrid& grid = md.grid();
    std::string out;
    for (std::size_t i = 0; i < grid.outcomes().size(); ++i)
        out += "k_" + std::to_string(i + 1) + ",";
    out += "weight\n";
    for (std::size_t i = 0; i < grid.point_count(); ++i) {
        if (md.weight(i) <= weight_epsilon) continue;  // support points only
        for (int k : grid.point(i)) out += std::to_string(k) + ",";
        out += format_weight(md.weight(i)) + "\n";
    }
    return out;
}

json summary_to_json(const MetaSummary& summary, const SimplexGrid& grid) {
    json top = json::array();
    for (const auto& [index, weight] : summary.top) {
        const auto p = grid.point(index);
        top.push_back(json{{"counts", std::vector<int>(p.begin(), p.end())},
                           {"weight", weight}});
    }
    return json{{"expected_p", summary.expected},
                {"support_size", summary.support_size},
                {"top", top}};
}

json report_to_json(const ComparisonReport& report) {
    const MetaprobRun& meta = report.metaprob;
    json metaprob = summary_to_json(meta.summary, meta.posterior.grid());
    metaprob["evidence"] = json{{"parity",
                                 {{"successes", meta.parity.successes},
                                  {"trials", meta.parity.trials}}},
                                {"magnitude",
                                 {{"successes", meta.magnitude.successes},
                                  {"trials", meta.magnitude.trials}}}};
    metaprob["constraint_points"] = meta.constraint_points.size();
    metaprob["constraint_mass"] = meta.constraint_mass;

    const DsRun& ds = report.ds;
    json singletons = json::array();
    for (const auto& row : ds.singletons)
        singletons.push_back(json{{"face", row.label},
                                  {"mass", row.mass},
                                  {"bel", row.bel},
                                  {"pl", row.pl},
                                  {"bel_linear", row.bel_linear},
                                  {"pl_linear", row.pl_linear}});
    json candidates = json::array();
    for (const auto& row : ds.candidates)
        candidates.push_back(json{{"subset", subset_key(row.subset)},
                                  {"mass", row.mass},
                                  {"bel", row.bel},
                                  {"pl", row.pl}});
    json ds_json{{"epsilon", ds.epsilon},
                 {"conflict", ds.conflict},
                 {"classification", to_string(ds.classification)},
                 {"masses", mass_to_json(ds.combined)["masses"]},
                 {"singletons", singletons},
                 {"candidates", candidates}};

    return json{{"scenario", scenario_to_json(report.scenario)},
                {"metaprob", metaprob},
                {"ds", ds_json},
                {"symmetry",
                 {{"ds", report.ds_symmetric}, {"metaprob", report.metaprob_symmetric}}}};
}

}  // namespace evid::io
