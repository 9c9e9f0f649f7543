#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evid/experiment.hpp"
#include "evid/json_io.hpp"
#include "oracles.hpp"

using namespace evid;

TEST_CASE("sensor bpa estimation") {
    const Frame oe = parity_frame();

    const MassFunction limit = estimate_bpa(oe, 0.0);
    CHECK(limit.focal_count() == 2);
    CHECK(limit.mass(oe.subset({"odd"})) == 0.5);
    CHECK(limit.mass(oe.subset({"even"})) == 0.5);

    const MassFunction ignorant = estimate_bpa(oe, 1.0);
    CHECK(ignorant == MassFunction::vacuous(oe));

    const MassFunction partial = estimate_bpa(oe, 0.2);
    CHECK(std::abs(partial.mass(oe.subset({"odd"})) - 0.4) <= 1e-15);
    CHECK(std::abs(partial.mass(oe.subset({"even"})) - 0.4) <= 1e-15);
    CHECK(std::abs(partial.mass(oe.full_set()) - 0.2) <= 1e-15);

    CHECK_THROWS_AS(estimate_bpa(oe, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_bpa(oe, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_bpa(die_frame(), 0.5), std::invalid_argument);
}

TEST_CASE("scenario validation") {
    DieScenario s;
    s.trials = 3;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.mode = TossMode::simulated;
    CHECK_NOTHROW(s.validate());
    s.denominator = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.denominator = 6;
    s.epsilon = 1.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.epsilon = std::nullopt;
    s.true_die = {1, 0, 0, 0, 0, 0.5};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    DieScenario defaults;
    CHECK(defaults.resolved_epsilon() == 0.0);
    defaults.mode = TossMode::simulated;
    defaults.trials = 9999;
    CHECK(defaults.resolved_epsilon() == 1.0 / 10000.0);
    defaults.epsilon = 0.25;
    CHECK(defaults.resolved_epsilon() == 0.25);
}

TEST_CASE("belief-function side in the evidence limit") {
    DieScenario s;
    s.epsilon = 0.0;
    const DsRun run = run_ds(s);
    const Frame f = run.combined.frame();

    CHECK(run.conflict == 0.0);
    CHECK(run.combined.focal_count() == 4);
    CHECK(run.combined.mass(f.subset({"1", "3"})) == 0.25);
    CHECK(run.combined.mass(f.subset({"2"})) == 0.25);
    CHECK(run.combined.mass(f.subset({"4", "6"})) == 0.25);
    CHECK(run.combined.mass(f.subset({"5"})) == 0.25);
    CHECK(run.classification == BeliefClass::quasi_support);

    // No residual ignorance on the doubly pinned faces.
    for (const auto& row : run.singletons) {
        if (row.label == "2" || row.label == "5") {
            CHECK(row.bel == 0.25);
            CHECK(row.pl == 0.25);
        } else {
            CHECK(row.bel == 0.0);
            CHECK(row.pl == 0.25);
        }
    }
    CHECK(run.candidates.size() == 9);
}

TEST_CASE("belief-function side at finite evidence") {
    DieScenario s;
    s.epsilon = 0.1;
    const DsRun run = run_ds(s);
    const Frame f = run.combined.frame();
    const double a = 0.45;

    CHECK(run.conflict == 0.0);
    CHECK(run.combined.focal_count() == 9);
    for (const char* key : {"2", "5"})
        CHECK(std::abs(run.combined.mass(f.subset({key})) - a * a) <= 1e-12);
    CHECK(std::abs(run.combined.mass(f.subset({"1", "3"})) - a * a) <= 1e-12);
    CHECK(std::abs(run.combined.mass(f.subset({"4", "6"})) - a * a) <= 1e-12);
    for (const auto& members :
         {std::vector<std::string>{"1", "2", "3"}, std::vector<std::string>{"4", "5", "6"},
          std::vector<std::string>{"1", "3", "5"}, std::vector<std::string>{"2", "4", "6"}})
        CHECK(std::abs(run.combined.mass(f.subset(members)) - a * 0.1) <= 1e-12);
    CHECK(std::abs(run.combined.mass(f.full_set()) - 0.01) <= 1e-12);

    for (const auto& row : run.singletons) {
        CHECK(std::abs(row.pl - 0.3025) <= 1e-12);
        CHECK(std::abs(row.pl_linear - 0.3) <= 1e-15);
        if (row.label == "2" || row.label == "5") {
            CHECK(std::abs(row.bel - 0.2025) <= 1e-12);
            CHECK(std::abs(row.bel_linear - 0.2) <= 1e-15);
        } else {
            CHECK(row.bel == 0.0);
            CHECK(row.bel_linear == 0.0);
        }
        // The exact values sit an epsilon^2/4 above the first-order forms.
        CHECK(std::abs(row.pl - row.pl_linear - 0.0025) <= 1e-12);
    }
}

TEST_CASE("ignorance persists for every epsilon strictly inside (0,1)") {
    for (double eps : {0.01, 0.1, 0.5, 0.9, 0.99}) {
        DieScenario s;
        s.epsilon = eps;
        const DsRun run = run_ds(s);
        for (const auto& row : run.singletons) CHECK(row.bel < row.pl);
    }
}

TEST_CASE("conflict stays zero across the ignorance sweep") {
    for (int i = 0; i <= 50; ++i) {
        DieScenario s;
        s.epsilon = i / 100.0;
        CHECK(run_ds(s).conflict == 0.0);
    }
}

TEST_CASE("metaprobability side concentrates on the constraint set") {
    DieScenario s;  // N = 10^4, d = 6, exact_half
    const MetaprobRun run = run_metaprob(s);
    CHECK(run.parity.successes == 5000);
    CHECK(run.magnitude.trials == 10000);
    CHECK(run.constraint_points.size() == 30);
    CHECK(run.constraint_mass >= 0.999);
    CHECK(run.summary.support_size >= 30);

    DieScenario finer;
    finer.denominator = 12;
    const MetaprobRun run12 = run_metaprob(finer);
    CHECK(run12.constraint_mass >= 0.999);
}

TEST_CASE("no evidence leaves the prior untouched") {
    DieScenario s;
    s.trials = 0;
    const MetaprobRun run = run_metaprob(s);
    CHECK(run.summary.support_size == 462);
    for (std::size_t i = 0; i < run.posterior.grid().point_count(); ++i)
        REQUIRE(run.posterior.weight(i) == 1.0 / 462.0);
}

TEST_CASE("comparison report contrasts the calculi") {
    DieScenario s;
    s.epsilon = 0.0;
    const ComparisonReport report = compare(s);

    // Point-valued beliefs on 2 and 5 while the posterior keeps 30 points.
    for (const auto& row : report.ds.singletons)
        if (row.label == "2" || row.label == "5") CHECK(row.bel == row.pl);
    CHECK(report.metaprob.summary.support_size == 30);
    CHECK(report.ds_symmetric);
    CHECK(report.metaprob_symmetric);
}

TEST_CASE("total ignorance on both sides without evidence") {
    DieScenario s;
    s.trials = 0;
    s.epsilon = 1.0;
    const ComparisonReport report = compare(s);
    CHECK(report.ds.combined == MassFunction::vacuous(die_frame()));
    CHECK(report.metaprob.summary.support_size == 462);
    CHECK(report.ds_symmetric);
    CHECK(report.metaprob_symmetric);
}

TEST_CASE("symmetry under the face swap holds across the ignorance sweep") {
    for (double eps : {0.0, 0.05, 0.2, 0.7}) {
        DieScenario s;
        s.epsilon = eps;
        s.trials = 100;
        const ComparisonReport report = compare(s);
        CHECK(report.ds_symmetric);
        CHECK(report.metaprob_symmetric);
    }
}

TEST_CASE("simulated mode is deterministic per seed") {
    DieScenario s;
    s.mode = TossMode::simulated;
    s.trials = 2000;
    s.seed = 42;

    const ComparisonReport a = compare(s);
    const ComparisonReport b = compare(s);
    CHECK(io::report_to_json(a).dump() == io::report_to_json(b).dump());
    CHECK(a.metaprob.parity.successes == b.metaprob.parity.successes);

    s.seed = 43;
    const ComparisonReport c = compare(s);
    CHECK(c.metaprob.parity.successes != a.metaprob.parity.successes);

    // Counts hover near half for a fair die.
    CHECK(a.metaprob.parity.successes > 800);
    CHECK(a.metaprob.parity.successes < 1200);

    // The ignorance mass defaults to 1/(N+1) in simulated mode.
    CHECK(a.ds.epsilon == 1.0 / 2001.0);
}

TEST_CASE("report serialization is stable and complete") {
    DieScenario s;
    s.epsilon = 0.0;
    const ComparisonReport report = compare(s);
    const io::json j = io::report_to_json(report);

    CHECK(j["scenario"]["N"] == 10000);
    CHECK(j["ds"]["conflict"] == 0.0);
    CHECK(j["ds"]["masses"]["1+3"] == 0.25);
    CHECK(j["ds"]["classification"] == "quasi_support");
    CHECK(j["metaprob"]["constraint_points"] == 30);
    CHECK(j["metaprob"]["support_size"] == 30);
    CHECK(j["symmetry"]["ds"] == true);

    CHECK(io::report_to_json(compare(s)).dump() == j.dump());
}
