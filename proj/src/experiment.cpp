#include "evid/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace evid {

namespace {

// 1 <-> 4, 2 <-> 5, 3 <-> 6 as zero-based face indices.
std::size_t opposite_face(std::size_t i) { return (i + 3) % 6; }

std::uint64_t permute_bits(std::uint64_t bits) {
    std::uint64_t out = 0;
    for (std::size_t i = 0; i < 6; ++i)
        if ((bits >> i) & 1) out |= std::uint64_t{1} << opposite_face(i);
    return out;
}

/// 53-bit uniform draw in [0, 1); fully determined by the generator state.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw_face(std::mt19937_64& rng, const std::array<double, 6>& die) {
    const double u = uniform01(rng);
    double cum = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        cum += die[i];
        if (u < cum) return i;
    }
    return 5;
}

}  // namespace

Frame die_frame() { return Frame({"1", "2", "3", "4", "5", "6"}); }
Frame parity_frame() { return Frame({"odd", "even"}); }
Frame magnitude_frame() { return Frame({"large", "small"}); }

Refining parity_refining() {
    Frame coarse = parity_frame();
    Frame fine = die_frame();
    return Refining(coarse, fine,
                    {fine.subset({"1", "3", "5"}), fine.subset({"2", "4", "6"})});
}

Refining magnitude_refining() {
    Frame coarse = magnitude_frame();
    Frame fine = die_frame();
    return Refining(coarse, fine,
                    {fine.subset({"4", "5", "6"}), fine.subset({"1", "2", "3"})});
}

std::vector<LinearConstraint> half_half_constraints(const Frame& die) {
    return {
        LinearConstraint(die.subset({"1", "3", "5"}), 1, 2),
        LinearConstraint(die.subset({"2", "4", "6"}), 1, 2),
        LinearConstraint(die.subset({"4", "5", "6"}), 1, 2),
        LinearConstraint(die.subset({"1", "2", "3"}), 1, 2),
    };
}

double DieScenario::resolved_epsilon() const {
    if (epsilon) return *epsilon;
    if (mode == TossMode::exact_half) return 0.0;
    return 1.0 / (static_cast<double>(trials) + 1.0);
}

void DieScenario::validate() const {
    if (denominator < 1)
        throw std::invalid_argument("DieScenario: denominator must be at least 1");
    if (mode == TossMode::exact_half && trials % 2 != 0)
        throw std::invalid_argument("DieScenario: exact_half mode needs an even trial count");
    if (epsilon && (*epsilon < 0.0 || *epsilon > 1.0))
        throw std::invalid_argument("DieScenario: epsilon must lie in [0, 1]");
    double total = 0.0;
    for (double p : true_die) {
        if (p < 0.0) throw std::invalid_argument("DieScenario: negative face probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("DieScenario: face probabilities must sum to 1");
}

MetaprobRun run_metaprob(const DieScenario& scenario) {
    scenario.validate();
    const Frame die = die_frame();
    const SubsetMask odd = die.subset({"1", "3", "5"});
    const SubsetMask large = die.subset({"4", "5", "6"});

    SensorReport parity{0, scenario.trials};
    SensorReport magnitude{0, scenario.trials};
    if (scenario.mode == TossMode::exact_half) {
        parity.successes = scenario.trials / 2;
        magnitude.successes = scenario.trials / 2;
    } else {
        std::mt19937_64 rng(scenario.seed);
        for (std::uint64_t t = 0; t < scenario.trials; ++t)
            if (odd.contains(draw_face(rng, scenario.true_die))) ++parity.successes;
        for (std::uint64_t t = 0; t < scenario.trials; ++t)
            if (large.contains(draw_face(rng, scenario.true_die))) ++magnitude.successes;
    }

    SimplexGrid grid(die, scenario.denominator);
    MetaDistribution prior = uniform_prior(grid);

    std::vector<EvidenceRecord> evidence;
    if (scenario.trials > 0) {
        evidence.emplace_back(odd, parity.successes, parity.trials);
        evidence.emplace_back(large, magnitude.successes, magnitude.trials);
    }
    MetaDistribution posterior = evidence.empty() ? prior : update(prior, evidence);

    const auto constraints = half_half_constraints(die);
    std::vector<std::size_t> constraint_points = constraint_filter(grid, constraints);
    double constraint_mass = 0.0;
    for (std::size_t i : constraint_points) constraint_mass += posterior.weight(i);

    MetaSummary summary = summarize(posterior);
    return MetaprobRun{std::move(posterior), std::move(summary), parity, magnitude,
                       std::move(constraint_points), constraint_mass};
}

MassFunction estimate_bpa(const Frame& binary_frame, double epsilon) {
    if (binary_frame.size() != 2)
        throw std::invalid_argument("estimate_bpa: frame must have exactly two outcomes");
    if (epsilon < 0.0 || epsilon > 1.0)
        throw std::invalid_argument("estimate_bpa: epsilon must lie in [0, 1]");
    const double half = 0.5 - epsilon / 2.0;
    return MassFunction::validate(binary_frame, {{binary_frame.singleton(0), half},
                                                 {binary_frame.singleton(1), half},
                                                 {binary_frame.full_set(), epsilon}});
}

DsRun run_ds(const DieScenario& scenario) {
    scenario.validate();
    const double epsilon = scenario.resolved_epsilon();

    const Refining to_parity = parity_refining();
    const Refining to_magnitude = magnitude_refining();
    const MassFunction parity_bpa = estimate_bpa(to_parity.coarse(), epsilon);
    const MassFunction magnitude_bpa = estimate_bpa(to_magnitude.coarse(), epsilon);

    const MassFunction parity_fine = vacuous_extension(parity_bpa, to_parity);
    const MassFunction magnitude_fine = vacuous_extension(magnitude_bpa, to_magnitude);
    Combination combo = dempster_combine(parity_fine, magnitude_fine);

    const Frame& die = combo.mass.frame();
    std::vector<SingletonRow> singletons;
    for (std::size_t i = 0; i < die.size(); ++i) {
        const SubsetMask face = die.singleton(i);
        SingletonRow row;
        row.label = die.label(i);
        row.mass = combo.mass.mass(face);
        row.bel = bel(combo.mass, face);
        row.pl = pl(combo.mass, face);
        // The exact singleton values are quadratics in epsilon; these are
        // their first-order truncations. A face pinned by both sensors has
        // its singleton focal.
        row.bel_linear = row.mass > 0.0 ? 0.25 - epsilon / 2.0 : 0.0;
        row.pl_linear = 0.25 + epsilon / 2.0;
        singletons.push_back(std::move(row));
    }

    // Candidate focal elements: cross intersections of each sensor's
    // extended focal family {image(0), image(1), full frame}.
    std::vector<SubsetMask> family1 = {to_parity.image(0), to_parity.image(1),
                                       die.full_set()};
    std::vector<SubsetMask> family2 = {to_magnitude.image(0), to_magnitude.image(1),
                                       die.full_set()};
    std::vector<std::uint64_t> candidate_bits;
    for (const auto& a : family1)
        for (const auto& b : family2) candidate_bits.push_back((a & b).bits());
    std::sort(candidate_bits.begin(), candidate_bits.end());
    candidate_bits.erase(std::unique(candidate_bits.begin(), candidate_bits.end()),
                         candidate_bits.end());

    std::vector<FocalRow> candidates;
    for (std::uint64_t bits : candidate_bits) {
        SubsetMask subset(die, bits);
        candidates.push_back(FocalRow{subset, combo.mass.mass(subset), bel(combo.mass, subset),
                                      pl(combo.mass, subset)});
    }

    const BeliefClass classification = classify(combo.mass);
    return DsRun{epsilon,        std::move(combo.mass),  combo.conflict,
                 classification, std::move(singletons),  std::move(candidates)};
}

ComparisonReport compare(const DieScenario& scenario) {
    ComparisonReport report{scenario, run_metaprob(scenario), run_ds(scenario), false, false};

    constexpr double tol = 1e-12;
    bool ds_ok = true;
    const auto& entries = report.ds.combined.entries();
    for (const auto& [bits, value] : entries) {
        auto it = entries.find(permute_bits(bits));
        if (it == entries.end() || std::abs(it->second - value) > tol) {
            ds_ok = false;
            break;
        }
    }
    report.ds_symmetric = ds_ok;

    const MetaDistribution& posterior = report.metaprob.posterior;
    const SimplexGrid& grid = posterior.grid();
    bool meta_ok = true;
    std::vector<int> permuted(6);
    for (std::size_t i = 0; i < grid.point_count() && meta_ok; ++i) {
        const auto p = grid.point(i);
        for (std::size_t j = 0; j < 6; ++j) permuted[opposite_face(j)] = p[j];
        const auto mirror = grid.find(permuted);
        meta_ok = mirror && std::abs(posterior.weight(*mirror) - posterior.weight(i)) <= tol;
    }
    report.metaprob_symmetric = meta_ok;
    return report;
}

}  // namespace evid
