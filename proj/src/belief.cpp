#include "evid/belief.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace evid {

namespace {

void require_frame(const MassFunction& m, const SubsetMask& subset) {
    if (subset.frame() != m.frame())
        throw std::invalid_argument("MassFunction: subset belongs to a different frame");
}

std::size_t dense_size(const Frame& frame) {
    if (frame.size() > dense_table_max_outcomes)
        throw std::invalid_argument(
            "dense subset table limited to frames of at most " +
            std::to_string(dense_table_max_outcomes) + " outcomes");
    return std::size_t{1} << frame.size();
}

}  // namespace

MassFunction MassFunction::validate(
    const Frame& frame, const std::vector<std::pair<SubsetMask, double>>& raw) {
    std::map<std::uint64_t, double> acc;
    double total = 0.0;
    for (const auto& [subset, value] : raw) {
        if (subset.frame() != frame)
            throw std::invalid_argument("MassFunction: subset belongs to a different frame");
        if (value < -mass_epsilon)
            throw std::invalid_argument("MassFunction: negative mass on a subset");
        if (subset.empty()) {
            if (value > mass_epsilon)
                throw std::invalid_argument("MassFunction: m(empty set) must be 0");
            continue;
        }
        total += value;
        acc[subset.bits()] += value;
    }
    if (std::abs(total - 1.0) > mass_epsilon)
        throw std::invalid_argument("MassFunction: masses must sum to 1, got " +
                                    std::to_string(total));
    for (auto it = acc.begin(); it != acc.end();) {
        if (it->second <= mass_epsilon)
            it = acc.erase(it);
        else
            ++it;
    }
    return MassFunction(frame, std::move(acc));
}

MassFunction MassFunction::vacuous(const Frame& frame) {
    return validate(frame, {{frame.full_set(), 1.0}});
}

double MassFunction::mass(const SubsetMask& subset) const {
    require_frame(*this, subset);
    auto it = entries_.find(subset.bits());
    return it == entries_.end() ? 0.0 : it->second;
}

std::vector<SubsetMask> MassFunction::focal_elements() const {
    std::vector<SubsetMask> out;
    out.reserve(entries_.size());
    for (const auto& [bits, value] : entries_) out.emplace_back(frame_, bits);
    return out;
}

SubsetMask MassFunction::core() const {
    std::uint64_t bits = 0;
    for (const auto& [focal, value] : entries_) bits |= focal;
    return SubsetMask(frame_, bits);
}

bool MassFunction::operator==(const MassFunction& other) const {
    return frame_ == other.frame_ && entries_ == other.entries_;
}

double bel(const MassFunction& m, const SubsetMask& subset) {
    require_frame(m, subset);
    double sum = 0.0;
    for (const auto& [focal, value] : m.entries())
        if ((focal & ~subset.bits()) == 0) sum += value;
    return sum;
}

double pl(const MassFunction& m, const SubsetMask& subset) {
    require_frame(m, subset);
    double sum = 0.0;
    for (const auto& [focal, value] : m.entries())
        if ((focal & subset.bits()) != 0) sum += value;
    const double dual = 1.0 - bel(m, subset.complement());
    if (std::abs(sum - dual) > 1e-9)
        throw std::logic_error("pl: direct sum and complement route disagree");
    return sum;
}

std::vector<double> bel_table(const MassFunction& m) {
    const std::size_t n = m.frame().size();
    const std::size_t size = dense_size(m.frame());
    std::vector<double> table(size, 0.0);
    for (const auto& [focal, value] : m.entries()) table[focal] += value;
    // Zeta transform over the subset lattice: table[A] = sum of m(B), B in A.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t mask = 0; mask < size; ++mask)
            if (mask & (std::size_t{1} << i)) table[mask] += table[mask ^ (std::size_t{1} << i)];
    return table;
}

MassFunction mass_from_bel(const Frame& frame, const std::vector<double>& bel_values) {
    const std::size_t n = frame.size();
    const std::size_t size = dense_size(frame);
    if (bel_values.size() != size)
        throw std::invalid_argument("mass_from_bel: table must cover all 2^|frame| subsets");
    constexpr double tol = 1e-9;
    if (std::abs(bel_values[0]) > tol)
        throw std::invalid_argument("mass_from_bel: Bel(empty set) must be 0");

    std::vector<double> mass(bel_values);
    // Moebius inversion, the inverse of the zeta transform above.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t mask = 0; mask < size; ++mask)
            if (mask & (std::size_t{1} << i)) mass[mask] -= mass[mask ^ (std::size_t{1} << i)];

    std::vector<std::pair<SubsetMask, double>> entries;
    double total = 0.0;
    for (std::size_t mask = 1; mask < size; ++mask) {
        const double v = mass[mask];
        if (v < -tol)
            throw std::invalid_argument(
                "mass_from_bel: input is not a belief function (negative mass)");
        if (v > mass_epsilon) {
            entries.emplace_back(SubsetMask(frame, mask), v);
            total += v;
        }
    }
    if (std::abs(total - 1.0) > tol)
        throw std::invalid_argument("mass_from_bel: recovered masses do not sum to 1");
    // Inversion noise can leave the total a hair off the strict constructor
    // tolerance; rescale within the 1e-9 contract.
    if (std::abs(total - 1.0) > mass_epsilon)
        for (auto& [subset, v] : entries) v /= total;
    return MassFunction::validate(frame, entries);
}

BeliefClass classify(const MassFunction& m) {
    const SubsetMask core = m.core();
    if (m.mass(core) > 0.0) return BeliefClass::support;

    const auto& entries = m.entries();
    bool disjoint = true;
    for (auto i = entries.begin(); i != entries.end() && disjoint; ++i) {
        auto j = i;
        for (++j; j != entries.end(); ++j)
            if ((i->first & j->first) != 0) {
                disjoint = false;
                break;
            }
    }
    return disjoint ? BeliefClass::quasi_support : BeliefClass::other;
}

const char* to_string(BeliefClass c) {
    switch (c) {
        case BeliefClass::support: return "support";
        case BeliefClass::quasi_support: return "quasi_support";
        case BeliefClass::other: return "other";
    }
    return "other";
}

MassFunction vacuous_extension(const MassFunction& coarse, const Refining& r) {
    if (coarse.frame() != r.coarse())
        throw std::invalid_argument(
            "vacuous_extension: mass function is not over the refining's coarse frame");
    std::vector<std::pair<SubsetMask, double>> entries;
    entries.reserve(coarse.focal_count());
    for (const auto& [bits, value] : coarse.entries())
        entries.emplace_back(r.refine(SubsetMask(coarse.frame(), bits)), value);
    return MassFunction::validate(r.fine(), entries);
}

Combination dempster_combine(const MassFunction& m1, const MassFunction& m2) {
    if (m1.frame() != m2.frame())
        throw std::invalid_argument("dempster_combine: mass functions over different frames");

    std::map<std::uint64_t, double> acc;
    double conflict = 0.0;
    for (const auto& [b1, v1] : m1.entries()) {
        for (const auto& [b2, v2] : m2.entries()) {
            const std::uint64_t inter = b1 & b2;
            const double product = v1 * v2;
            if (inter == 0)
                conflict += product;
            else
                acc[inter] += product;
        }
    }
    if (conflict >= 1.0 - mass_epsilon)
        throw std::domain_error(
            "dempster_combine: total conflict, the combination is undefined");

    std::vector<std::pair<SubsetMask, double>> entries;
    entries.reserve(acc.size());
    // Skip the renormalization entirely when there is no conflict so that
    // conflict-free results (combining with the vacuous function, the
    // limiting two-sensor case) come out bit-exact.
    const double k = conflict == 0.0 ? 1.0 : 1.0 / (1.0 - conflict);
    for (const auto& [bits, value] : acc)
        entries.emplace_back(SubsetMask(m1.frame(), bits), value * k);
    return Combination{MassFunction::validate(m1.frame(), entries), conflict};
}

}  // namespace evid
