#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "evid/frame.hpp"

namespace evid {

/// Weights at or below this threshold do not count toward a distribution's
/// support and are omitted from exports.
inline constexpr double weight_epsilon = 1e-12;

/// All first-order probability distributions over a frame whose masses are
/// multiples of 1/d, enumerated once in lexicographic order. Each point is
/// an integer count vector (k_1..k_n) with sum d, standing for p_i = k_i/d,
/// so point identity and linear constraints stay exact; floating point only
/// enters through weights. Copies share storage.
class SimplexGrid {
public:
    /// Enumerates the grid. Throws if the point count C(d+n-1, n-1) would
    /// exceed max_points.
    SimplexGrid(Frame outcomes, int denominator,
                std::uint64_t max_points = default_max_points);

    const Frame& outcomes() const;
    int denominator() const;
    std::size_t point_count() const;

    /// Count vector of point i.
    std::span<const int> point(std::size_t i) const;

    /// Index of a count vector, if it lies on the grid.
    std::optional<std::size_t> find(std::span<const int> counts) const;

    /// Probability the point assigns to an event: sum of member counts / d.
    /// Exact whenever the integer sum divides the denominator evenly.
    double event_probability(std::size_t point, const SubsetMask& event) const;

    /// Grids over equal frames with equal denominators enumerate identical
    /// points and compare equal.
    bool operator==(const SimplexGrid& other) const;
    bool operator!=(const SimplexGrid& other) const { return !(*this == other); }

    static constexpr std::uint64_t default_max_points = 100'000'000;

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// A meta-level distribution: one normalized weight per grid point.
/// Immutable; safe to share across threads.
class MetaDistribution {
public:
    /// Weights must be non-negative and sum to 1 within 1e-12.
    MetaDistribution(SimplexGrid grid, std::vector<double> weights);

    const SimplexGrid& grid() const { return grid_; }
    std::span<const double> weights() const { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }

private:
    SimplexGrid grid_;
    std::vector<double> weights_;
};

/// A batch of observations of one event: out of `trials` observed outcomes,
/// the event occurred `successes` times.
struct EvidenceRecord {
    EvidenceRecord(SubsetMask event, std::uint64_t successes, std::uint64_t trials);

    SubsetMask event;
    std::uint64_t successes;
    std::uint64_t trials;
};

/// An exact marginal constraint on grid points: the probability of `subset`
/// equals num/den. Filtering requires num/den to be representable on the
/// grid, i.e. num * d / den integral.
struct LinearConstraint {
    LinearConstraint(SubsetMask subset, long long num, long long den);

    SubsetMask subset;
    long long num;
    long long den;
};

/// Equal weight on every grid point: the prior of extreme ignorance.
MetaDistribution uniform_prior(const SimplexGrid& grid);

/// Weight proportional to exp(-concentration * L1(point, center) / d),
/// peaked at a chosen grid point. Concentration 0 reduces to the uniform
/// prior. The center must lie on the grid.
MetaDistribution peaked_prior(const SimplexGrid& grid, std::span<const int> center,
                              double concentration);

/// Log-likelihood of an evidence record under one grid point:
///   successes * log P(event) + (trials - successes) * log(1 - P(event)).
/// Terms with a zero exponent contribute zero; a zero-probability term with
/// a positive exponent yields -infinity, which is a value, not an error.
/// The p-independent binomial coefficient is omitted; it is absorbed by the
/// posterior normalization.
double event_log_likelihood(const SimplexGrid& grid, std::size_t point,
                            const EvidenceRecord& evidence);

/// Bayes update of a meta-distribution on a batch of evidence. Likelihoods
/// accumulate in log space with a max shift before exponentiation, so large
/// trial counts do not underflow. Points with impossible evidence get weight
/// exactly zero; throws if that would be every point.
MetaDistribution update(const MetaDistribution& prior,
                        std::span<const EvidenceRecord> evidence);

/// Indices of the grid points satisfying every constraint, by exact integer
/// arithmetic.
std::vector<std::size_t> constraint_filter(const SimplexGrid& grid,
                                           std::span<const LinearConstraint> constraints);

struct MetaSummary {
    /// Weight-averaged first-order distribution.
    std::vector<double> expected;
    /// Number of points with weight above weight_epsilon.
    std::size_t support_size;
    /// Heaviest points as (index, weight), descending by weight, ties by index.
    std::vector<std::pair<std::size_t, double>> top;
};

MetaSummary summarize(const MetaDistribution& md, std::size_t top_k = 10);

}  // namespace evid
