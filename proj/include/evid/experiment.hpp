#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evid/belief.hpp"
#include "evid/frame.hpp"
#include "evid/metaprob.hpp"

namespace evid {

/// The six-sided-die two-sensor scenario: one sensor reports odd/even, the
/// other large/small, each watching its own batch of tosses. Both calculi
/// form beliefs about the next throw from the two sensor reports.

Frame die_frame();        // "1".."6"
Frame parity_frame();     // "odd", "even"
Frame magnitude_frame();  // "large", "small"

/// odd -> {1,3,5}, even -> {2,4,6}
Refining parity_refining();
/// large -> {4,5,6}, small -> {1,2,3}
Refining magnitude_refining();

/// The four exact marginal constraints a half/half report from each sensor
/// pins on a first-order die distribution: p(odd), p(even), p(large) and
/// p(small) all equal 1/2.
std::vector<LinearConstraint> half_half_constraints(const Frame& die);

enum class TossMode {
    /// Each sensor reports exactly half successes; requires an even trial count.
    exact_half,
    /// Tosses are drawn from a configured die with a seeded generator.
    simulated,
};

struct DieScenario {
    /// Tosses per sensor.
    std::uint64_t trials = 10000;
    /// Simplex grid denominator for the meta-level analysis.
    int denominator = 6;
    /// Residual ignorance mass for the sensor estimation step. Unset means 0
    /// in exact_half mode and 1/(trials+1) in simulated mode; the latter
    /// mapping is this toolkit's convention, not part of the source analysis.
    std::optional<double> epsilon;
    std::uint64_t seed = 0;
    TossMode mode = TossMode::exact_half;
    /// Face probabilities the simulated tosses are drawn from.
    std::array<double, 6> true_die = {1.0 / 6, 1.0 / 6, 1.0 / 6,
                                      1.0 / 6, 1.0 / 6, 1.0 / 6};

    double resolved_epsilon() const;
    /// Throws std::invalid_argument on any invariant violation.
    void validate() const;
};

struct SensorReport {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
};

struct MetaprobRun {
    MetaDistribution posterior;
    MetaSummary summary;
    /// Sensor evidence the update consumed.
    SensorReport parity;
    SensorReport magnitude;
    /// Grid points satisfying the four half/half constraints, and the
    /// posterior mass they capture.
    std::vector<std::size_t> constraint_points;
    double constraint_mass = 0.0;
};

/// Meta-level side: uniform prior over the grid, Bayes update on the two
/// sensor reports, posterior summary plus constraint-set capture.
MetaprobRun run_metaprob(const DieScenario& scenario);

/// The sensor estimation step for a binary frame with residual ignorance
/// epsilon: mass .5 - epsilon/2 on each outcome, epsilon on the whole frame.
/// Epsilon 0 is the infinite-trial limit; epsilon 1 is total ignorance.
MassFunction estimate_bpa(const Frame& binary_frame, double epsilon);

struct SingletonRow {
    std::string label;
    double mass = 0.0;
    double bel = 0.0;
    double pl = 0.0;
    /// First-order (in epsilon) forms of bel and pl; the exact values carry
    /// an extra epsilon^2/4.
    double bel_linear = 0.0;
    double pl_linear = 0.0;
};

struct FocalRow {
    SubsetMask subset;
    double mass = 0.0;
    double bel = 0.0;
    double pl = 0.0;
};

struct DsRun {
    double epsilon = 0.0;
    MassFunction combined;
    double conflict = 0.0;
    BeliefClass classification = BeliefClass::other;
    /// One row per die face.
    std::vector<SingletonRow> singletons;
    /// The nine candidate focal elements of the two-sensor combination
    /// (cross intersections of each sensor's extended focal family), listed
    /// even when their mass vanishes.
    std::vector<FocalRow> candidates;
};

/// Belief-function side: estimate each sensor's bpa, vacuously extend both
/// through the refinings to the die frame, combine with Dempster's rule, and
/// tabulate the results.
DsRun run_ds(const DieScenario& scenario);

struct ComparisonReport {
    DieScenario scenario;
    MetaprobRun metaprob;
    DsRun ds;
    /// Invariance of each result under the face relabeling (1<->4, 2<->5,
    /// 3<->6), checked to 1e-12.
    bool ds_symmetric = false;
    bool metaprob_symmetric = false;
};

/// Runs both analyses on one scenario and checks the shared symmetry.
ComparisonReport compare(const DieScenario& scenario);

}  // namespace evid
