#include "evid/metaprob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace evid {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// C(d+n-1, n-1) with an early bail once the count passes `cap`.
std::uint64_t composition_count(std::uint64_t n, std::uint64_t d, std::uint64_t cap) {
    const std::uint64_t m = d + n - 1;
    std::uint64_t k = std::min(n - 1, d);
    unsigned __int128 result = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        // Exact at every step: result * (m - i) is divisible by (i + 1).
        result = result * (m - i) / (i + 1);
        if (result > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(result);
}

}  // namespace

struct SimplexGrid::Impl {
    Frame outcomes;
    int denominator;
    std::size_t count = 0;
    std::vector<int> counts;  // flat, stride outcomes.size()

    Impl(Frame outcomes_, int denominator_)
        : outcomes(std::move(outcomes_)), denominator(denominator_) {}

    std::span<const int> point(std::size_t i) const {
        return {counts.data() + i * outcomes.size(), outcomes.size()};
    }
};

SimplexGrid::SimplexGrid(Frame outcomes, int denominator, std::uint64_t max_points) {
    if (denominator < 1)
        throw std::invalid_argument("SimplexGrid: denominator must be at least 1");
    const std::size_t n = outcomes.size();
    const std::uint64_t expected =
        composition_count(n, static_cast<std::uint64_t>(denominator), max_points);
    if (expected > max_points)
        throw std::invalid_argument("SimplexGrid: grid would exceed the cap of " +
                                    std::to_string(max_points) + " points");

    auto impl = std::make_shared<Impl>(std::move(outcomes), denominator);
    impl->count = static_cast<std::size_t>(expected);
    impl->counts.reserve(impl->count * n);

    // Lexicographic enumeration of all compositions of d into n parts.
    std::vector<int> scratch(n, 0);
    auto emit = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == n) {
            scratch[pos] = remaining;
            impl->counts.insert(impl->counts.end(), scratch.begin(), scratch.end());
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            scratch[pos] = k;
            self(self, pos + 1, remaining - k);
        }
    };
    emit(emit, 0, denominator);
    impl_ = std::move(impl);
}

const Frame& SimplexGrid::outcomes() const { return impl_->outcomes; }
int SimplexGrid::denominator() const { return impl_->denominator; }
std::size_t SimplexGrid::point_count() const { return impl_->count; }

std::span<const int> SimplexGrid::point(std::size_t i) const {
    if (i >= impl_->count)
        throw std::invalid_argument("SimplexGrid: point index out of range");
    return impl_->point(i);
}

std::optional<std::size_t> SimplexGrid::find(std::span<const int> counts) const {
    const std::size_t n = impl_->outcomes.size();
    if (counts.size() != n) return std::nullopt;
    std::size_t lo = 0, hi = impl_->count;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        const auto p = impl_->point(mid);
        const auto cmp = std::lexicographical_compare_three_way(
            p.begin(), p.end(), counts.begin(), counts.end());
        if (cmp == std::strong_ordering::equal) return mid;
        if (cmp == std::strong_ordering::less)
            lo = mid + 1;
        else
            hi = mid;
    }
    return std::nullopt;
}

double SimplexGrid::event_probability(std::size_t point_index,
                                      const SubsetMask& event) const {
    if (event.frame() != impl_->outcomes)
        throw std::invalid_argument("SimplexGrid: event over a different frame");
    const auto p = point(point_index);
    long long sum = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (event.contains(i)) sum += p[i];
    return static_cast<double>(sum) / impl_->denominator;
}

bool SimplexGrid::operator==(const SimplexGrid& other) const {
    return impl_ == other.impl_ ||
           (impl_->outcomes == other.impl_->outcomes &&
            impl_->denominator == other.impl_->denominator);
}

MetaDistribution::MetaDistribution(SimplexGrid grid, std::vector<double> weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
    if (weights_.size() != grid_.point_count())
        throw std::invalid_argument("MetaDistribution: one weight per grid point required");
    // Kahan summation: a plain sum over a large grid can drift past the
    // normalization tolerance on its own.
    double total = 0.0, carry = 0.0;
    for (double w : weights_) {
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("MetaDistribution: weights must be finite and non-negative");
        const double y = w - carry;
        const double t = total + y;
        carry = (t - total) - y;
        total = t;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("MetaDistribution: weights must sum to 1, got " +
                                    std::to_string(total));
}

EvidenceRecord::EvidenceRecord(SubsetMask event_, std::uint64_t successes_,
                               std::uint64_t trials_)
    : event(std::move(event_)), successes(successes_), trials(trials_) {
    if (successes > trials)
        throw std::invalid_argument("EvidenceRecord: successes exceed trials");
}

LinearConstraint::LinearConstraint(SubsetMask subset_, long long num_, long long den_)
    : subset(std::move(subset_)), num(num_), den(den_) {
    if (den < 1) throw std::invalid_argument("LinearConstraint: denominator must be positive");
    if (num < 0 || num > den)
        throw std::invalid_argument("LinearConstraint: target must lie in [0, 1]");
}

MetaDistribution uniform_prior(const SimplexGrid& grid) {
    const std::size_t n = grid.point_count();
    return MetaDistribution(grid, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

MetaDistribution peaked_prior(const SimplexGrid& grid, std::span<const int> center,
                              double concentration) {
    if (!(concentration >= 0.0))
        throw std::invalid_argument("peaked_prior: concentration must be non-negative");
    if (!grid.find(center))
        throw std::invalid_argument("peaked_prior: center is not a grid point");
    const double d = grid.denominator();
    std::vector<double> weights(grid.point_count());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const auto p = grid.point(i);
        long long l1 = 0;
        for (std::size_t j = 0; j < p.size(); ++j) l1 += std::abs(p[j] - center[j]);
        weights[i] = std::exp(-concentration * static_cast<double>(l1) / d);
        total += weights[i];
    }
    for (double& w : weights) w /= total;
    return MetaDistribution(grid, std::move(weights));
}

double event_log_likelihood(const SimplexGrid& grid, std::size_t point,
                            const EvidenceRecord& evidence) {
    if (evidence.successes > evidence.trials)
        throw std::invalid_argument("event_log_likelihood: successes exceed trials");
    const double p = grid.event_probability(point, evidence.event);
    // Complement from integer counts, so p and q are exact complements.
    const double q = 1.0 - p;
    const double s = static_cast<double>(evidence.successes);
    const double f = static_cast<double>(evidence.trials - evidence.successes);
    double log_lik = 0.0;
    if (s > 0.0) log_lik += p > 0.0 ? s * std::log(p) : neg_inf;
    if (f > 0.0) log_lik += q > 0.0 ? f * std::log(q) : neg_inf;
    return log_lik;
}

MetaDistribution update(const MetaDistribution& prior,
                        std::span<const EvidenceRecord> evidence) {
    const SimplexGrid& grid = prior.grid();
    for (const auto& record : evidence)
        if (record.event.frame() != grid.outcomes())
            throw std::invalid_argument("update: evidence event over a different frame");

    const std::size_t n = grid.point_count();
    std::vector<double> log_post(n);
    double shift = neg_inf;
    for (std::size_t i = 0; i < n; ++i) {
        double lp = prior.weight(i) > 0.0 ? std::log(prior.weight(i)) : neg_inf;
        for (const auto& record : evidence) {
            if (lp == neg_inf) break;
            lp += event_log_likelihood(grid, i, record);
        }
        log_post[i] = lp;
        shift = std::max(shift, lp);
    }
    if (shift == neg_inf)
        throw std::domain_error("update: evidence is impossible under every grid point");

    std::vector<double> weights(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = log_post[i] == neg_inf ? 0.0 : std::exp(log_post[i] - shift);
        total += weights[i];
    }
    for (double& w : weights) w /= total;
    return MetaDistribution(grid, std::move(weights));
}

std::vector<std::size_t> constraint_filter(const SimplexGrid& grid,
                                           std::span<const LinearConstraint> constraints) {
    const long long d = grid.denominator();
    std::vector<std::pair<std::uint64_t, long long>> compiled;  // event bits, required count
    compiled.reserve(constraints.size());
    for (const auto& c : constraints) {
        if (c.subset.frame() != grid.outcomes())
            throw std::invalid_argument("constraint_filter: subset over a different frame");
        const __int128 scaled = static_cast<__int128>(c.num) * d;
        if (scaled % c.den != 0)
            throw std::invalid_argument(
                "constraint_filter: target " + std::to_string(c.num) + "/" +
                std::to_string(c.den) + " is not representable on a grid of denominator " +
                std::to_string(d));
        compiled.emplace_back(c.subset.bits(), static_cast<long long>(scaled / c.den));
    }

    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < grid.point_count(); ++i) {
        const auto p = grid.point(i);
        bool ok = true;
        for (const auto& [bits, required] : compiled) {
            long long sum = 0;
            for (std::size_t j = 0; j < p.size(); ++j)
                if ((bits >> j) & 1) sum += p[j];
            if (sum != required) {
                ok = false;
                break;
            }
        }
        if (ok) hits.push_back(i);
    }
    return hits;
}

MetaSummary summarize(const MetaDistribution& md, std::size_t top_k) {
    const SimplexGrid& grid = md.grid();
    const std::size_t n = grid.outcomes().size();
    MetaSummary summary;
    summary.expected.assign(n, 0.0);
    summary.support_size = 0;

    const double d = grid.denominator();
    for (std::size_t i = 0; i < grid.point_count(); ++i) {
        const double w = md.weight(i);
        if (w > weight_epsilon) ++summary.support_size;
        if (w == 0.0) continue;
        const auto p = grid.point(i);
        for (std::size_t j = 0; j < n; ++j) summary.expected[j] += w * p[j] / d;
    }

    top_k = std::min(top_k, grid.point_count());
    std::vector<std::size_t> order(grid.point_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + top_k, order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (md.weight(a) != md.weight(b)) return md.weight(a) > md.weight(b);
                          return a < b;
                      });
    for (std::size_t i = 0; i < top_k; ++i)
        summary.top.emplace_back(order[i], md.weight(order[i]));
    return summary;
}

}  // namespace evid
