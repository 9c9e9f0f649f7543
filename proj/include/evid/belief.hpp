#pragma once

#include <map>
#include <utility>
#include <vector>

#include "evid/frame.hpp"

namespace evid {

/// Mass below this threshold is treated as zero and pruned from storage.
inline constexpr double mass_epsilon = 1e-12;

/// A basic probability assignment over a frame: mass on subsets, zero on the
/// empty set, total one. Only strictly positive entries are stored, keyed by
/// subset bits in ascending order so iteration is deterministic.
class MassFunction {
public:
    /// Validates and builds a mass function. Rejects mass on the empty set,
    /// negative mass, and totals off one by more than mass_epsilon; entries
    /// within mass_epsilon of zero are pruned. Duplicate subsets accumulate.
    static MassFunction validate(const Frame& frame,
                                 const std::vector<std::pair<SubsetMask, double>>& raw);

    /// The vacuous mass function: all mass on the full frame.
    static MassFunction vacuous(const Frame& frame);

    const Frame& frame() const { return frame_; }

    /// Mass of a subset (zero if not focal).
    double mass(const SubsetMask& subset) const;

    /// Focal entries as (subset bits, mass), ascending by bits.
    const std::map<std::uint64_t, double>& entries() const { return entries_; }
    std::size_t focal_count() const { return entries_.size(); }

    std::vector<SubsetMask> focal_elements() const;
    /// Union of the focal elements.
    SubsetMask core() const;

    bool operator==(const MassFunction& other) const;

private:
    MassFunction(Frame frame, std::map<std::uint64_t, double> entries)
        : frame_(std::move(frame)), entries_(std::move(entries)) {}

    Frame frame_;
    std::map<std::uint64_t, double> entries_;
};

/// Belief of a subset: total mass of focal elements contained in it. The
/// lower probability of the subset.
double bel(const MassFunction& m, const SubsetMask& subset);

/// Plausibility of a subset: total mass of focal elements intersecting it.
/// The upper probability; equals 1 - bel(complement). Both routes are
/// evaluated and cross-checked.
double pl(const MassFunction& m, const SubsetMask& subset);

/// Dense belief table indexed by subset bits (size 2^|frame|).
/// Frames larger than dense_table_max_outcomes are rejected.
std::vector<double> bel_table(const MassFunction& m);

inline constexpr std::size_t dense_table_max_outcomes = 20;

/// Recovers the mass function from a dense belief table via Moebius
/// inversion over the subset lattice. Rejects tables that are not belief
/// functions: nonzero value on the empty set, inverted mass below -1e-9, or
/// total off one by more than 1e-9.
MassFunction mass_from_bel(const Frame& frame, const std::vector<double>& bel_values);

enum class BeliefClass { support, quasi_support, other };

/// Classification of a mass function.
///
/// quasi_support: all focal elements are pairwise disjoint (ordinary
/// probability mass functions fall here). support: the core itself carries
/// positive mass; mass on the core straddles every split of the core, so
/// every non-empty proper subset of the core then has Bel strictly below Pl,
/// which is the second half of the support test. A function that is neither
/// classifies as other. When both tests pass (for example the vacuous
/// function) support takes precedence.
BeliefClass classify(const MassFunction& m);

const char* to_string(BeliefClass c);

/// Re-expresses a coarse mass function on the fine frame of a refining by
/// transporting each focal mass to the image of its subset. Adds no
/// constraints: Bel of every refined subset is preserved.
MassFunction vacuous_extension(const MassFunction& coarse, const Refining& r);

struct Combination {
    MassFunction mass;
    /// Total product mass that fell on empty intersections and was
    /// renormalized away.
    double conflict;
};

/// Dempster's rule of combination. Pools two mass functions over the same
/// frame by normalized products over intersecting focal pairs. The inputs
/// must come from distinct, independent bodies of evidence; that premise is
/// the caller's to assert and cannot be checked here. Throws on total
/// conflict (conflict == 1 within mass_epsilon).
Combination dempster_combine(const MassFunction& m1, const MassFunction& m2);

}  // namespace evid
