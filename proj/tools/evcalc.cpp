// evcalc: command-line front end for the evidential reasoning toolkit.
// Exit codes: 0 success, 1 validation error, 2 usage error.
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evid/belief.hpp"
#include "evid/experiment.hpp"
#include "evid/json_io.hpp"
#include "evid/metaprob.hpp"

using namespace evid;
using io::json;

namespace {

enum class Format { table, as_json, csv };

Format resolve_format(const std::string& requested) {
    if (requested == "table") return Format::table;
    if (requested == "json") return Format::as_json;
    if (requested == "csv") return Format::csv;
    if (!requested.empty())
        throw std::invalid_argument("--format must be one of table, json, csv");
    // Humans at a terminal get tables; pipes get the machine format.
    return isatty(fileno(stdout)) ? Format::table : Format::as_json;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string sig12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in '" + path + "': " + e.what());
    }
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write '" + out_path + "'");
    out << text;
    if (!out.good()) throw std::invalid_argument("failed writing '" + out_path + "'");
}

Frame frame_from_options(int n, const std::string& labels_csv) {
    if (!labels_csv.empty()) {
        std::vector<std::string> labels;
        std::stringstream ss(labels_csv);
        std::string item;
        while (std::getline(ss, item, ',')) labels.push_back(item);
        return Frame(labels);
    }
    std::vector<std::string> labels;
    for (int i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
    return Frame(labels);
}

std::vector<double> parse_doubles_csv(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<int> parse_ints_csv(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

std::string pad(const std::string& text, std::size_t width) {
    return text + std::string(text.size() < width ? width - text.size() : 1, ' ');
}

std::string mass_csv(const MassFunction& m) {
    std::string out = "subset,mass\n";
    for (const auto& [bits, value] : m.entries())
        out += io::subset_key(SubsetMask(m.frame(), bits)) + "," + sig12(value) + "\n";
    return out;
}

std::string mass_table(const MassFunction& m) {
    std::ostringstream out;
    out << "subset            mass\n";
    for (const auto& [bits, value] : m.entries())
        out << pad(io::subset_key(SubsetMask(m.frame(), bits)), 18) << fixed4(value)
            << "\n";
    return out.str();
}

std::string points_csv(const SimplexGrid& grid, const std::vector<std::size_t>& indices) {
    std::string out;
    for (std::size_t i = 0; i < grid.outcomes().size(); ++i)
        out += "k_" + std::to_string(i + 1) + (i + 1 < grid.outcomes().size() ? "," : "\n");
    for (std::size_t i : indices) {
        const auto p = grid.point(i);
        for (std::size_t j = 0; j < p.size(); ++j)
            out += std::to_string(p[j]) + (j + 1 < p.size() ? "," : "\n");
    }
    return out;
}

json points_json(const SimplexGrid& grid, const std::vector<std::size_t>& indices) {
    json points = json::array();
    for (std::size_t i : indices) {
        const auto p = grid.point(i);
        points.push_back(std::vector<int>(p.begin(), p.end()));
    }
    return points;
}

void run_combine(const std::string& m1_path, const std::string& m2_path, Format format,
                 const std::string& out_path) {
    const MassFunction m1 = io::mass_from_json(load_json_file(m1_path));
    const MassFunction m2 = io::mass_from_json(load_json_file(m2_path));
    const Combination combo = dempster_combine(m1, m2);
    switch (format) {
        case Format::as_json: {
            json j = io::mass_to_json(combo.mass);
            j["conflict"] = combo.conflict;
            emit(j.dump(2) + "\n", out_path);
            break;
        }
        case Format::csv:
            emit(mass_csv(combo.mass), out_path);
            break;
        case Format::table:
            emit(mass_table(combo.mass) + pad("conflict", 18) + fixed4(combo.conflict) +
                     "\n",
                 out_path);
            break;
    }
}

void run_extend(const std::string& mass_path, const std::string& refining_path,
                Format format, const std::string& out_path) {
    const Refining refining = io::refining_from_json(load_json_file(refining_path));
    const MassFunction coarse = io::mass_from_json(load_json_file(mass_path));
    const MassFunction fine = vacuous_extension(coarse, refining);
    switch (format) {
        case Format::as_json:
            emit(io::mass_to_json(fine).dump(2) + "\n", out_path);
            break;
        case Format::csv:
            emit(mass_csv(fine), out_path);
            break;
        case Format::table:
            emit(mass_table(fine), out_path);
            break;
    }
}

void run_bel_table(const std::string& mass_path, Format format,
                   const std::string& out_path) {
    const MassFunction m = io::mass_from_json(load_json_file(mass_path));
    const Frame& frame = m.frame();
    if (frame.size() > 16)
        throw std::invalid_argument("bel-table is limited to frames of at most 16 outcomes");
    const std::uint64_t size = std::uint64_t{1} << frame.size();

    json rows = json::array();
    std::string csv = "subset,mass,bel,pl\n";
    std::ostringstream table;
    table << "subset            mass    bel     pl\n";
    for (std::uint64_t bits = 0; bits < size; ++bits) {
        const SubsetMask subset(frame, bits);
        const double mass = m.mass(subset);
        const double below = bel(m, subset);
        const double above = pl(m, subset);
        rows.push_back(json{{"subset", io::subset_key(subset)},
                            {"mass", mass},
                            {"bel", below},
                            {"pl", above}});
        csv += io::subset_key(subset) + "," + sig12(mass) + "," + sig12(below) + "," +
               sig12(above) + "\n";
        table << pad(bits == 0 ? "(empty)" : io::subset_key(subset), 18) << fixed4(mass)
              << "  " << fixed4(below) << "  " << fixed4(above) << "\n";
    }
    switch (format) {
        case Format::as_json:
            emit(json{{"frame", io::frame_to_json(frame)}, {"rows", rows}}.dump(2) + "\n",
                 out_path);
            break;
        case Format::csv:
            emit(csv, out_path);
            break;
        case Format::table:
            emit(table.str(), out_path);
            break;
    }
}

void run_grid(const Frame& frame, int d, Format format, const std::string& out_path) {
    const SimplexGrid grid(frame, d);
    std::vector<std::size_t> all(grid.point_count());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    switch (format) {
        case Format::as_json:
            emit(json{{"outcomes", io::frame_to_json(frame)},
                      {"d", d},
                      {"point_count", grid.point_count()},
                      {"points", points_json(grid, all)}}
                         .dump(2) +
                     "\n",
                 out_path);
            break;
        case Format::csv:
            emit(points_csv(grid, all), out_path);
            break;
        case Format::table: {
            std::ostringstream table;
            table << grid.point_count() << " points (counts out of " << d << ")\n";
            for (std::size_t i : all) {
                for (int k : grid.point(i)) table << k << " ";
                table << "\n";
            }
            emit(table.str(), out_path);
            break;
        }
    }
}

std::vector<LinearConstraint> load_constraints(const Frame& frame, const std::string& choice) {
    if (choice == "half-half" || choice == "paper") return half_half_constraints(frame);
    return io::constraints_from_json(frame, load_json_file(choice));
}

void run_filter(const Frame& frame, int d, const std::string& constraints_choice,
                Format format, const std::string& out_path) {
    const SimplexGrid grid(frame, d);
    const auto constraints = load_constraints(frame, constraints_choice);
    const auto hits = constraint_filter(grid, constraints);
    switch (format) {
        case Format::as_json:
            emit(json{{"outcomes", io::frame_to_json(frame)},
                      {"d", d},
                      {"constraints", io::constraints_to_json(constraints)},
                      {"count", hits.size()},
                      {"points", points_json(grid, hits)}}
                         .dump(2) +
                     "\n",
                 out_path);
            break;
        case Format::csv:
            emit(points_csv(grid, hits), out_path);
            break;
        case Format::table: {
            std::ostringstream table;
            table << hits.size() << " of " << grid.point_count()
                  << " points satisfy the constraints (counts out of " << d << ")\n";
            for (std::size_t i : hits) {
                for (int k : grid.point(i)) table << k << " ";
                table << "\n";
            }
            emit(table.str(), out_path);
            break;
        }
    }
}

void run_update(const Frame& frame, int d, const std::string& evidence_path,
                const std::string& prior_kind, const std::string& center_csv,
                double concentration, Format format, const std::string& out_path) {
    const SimplexGrid grid(frame, d);

    MetaDistribution prior = uniform_prior(grid);
    if (prior_kind == "peaked") {
        if (center_csv.empty()) throw std::invalid_argument("--prior peaked requires --center");
        prior = peaked_prior(grid, parse_ints_csv(center_csv), concentration);
    } else if (prior_kind != "uniform") {
        throw std::invalid_argument("--prior must be 'uniform' or 'peaked'");
    }

    const auto evidence = io::evidence_from_json(frame, load_json_file(evidence_path));
    const MetaDistribution posterior = update(prior, evidence);
    const MetaSummary summary = summarize(posterior);

    switch (format) {
        case Format::as_json: {
            json j{{"outcomes", io::frame_to_json(frame)},
                   {"d", d},
                   {"summary", io::summary_to_json(summary, grid)},
                   {"posterior", io::meta_to_json(posterior)["points"]}};
            emit(j.dump(2) + "\n", out_path);
            break;
        }
        case Format::csv:
            emit(io::meta_to_csv(posterior), out_path);
            break;
        case Format::table: {
            std::ostringstream table;
            table << "posterior support: " << summary.support_size << " of "
                  << grid.point_count() << " points\nexpected p:";
            for (double p : summary.expected) table << " " << fixed4(p);
            table << "\ntop points (counts out of " << d << " / weight):\n";
            for (const auto& [index, weight] : summary.top) {
                table << "  ";
                for (int k : grid.point(index)) table << k << " ";
                table << "  " << fixed4(weight) << "\n";
            }
            emit(table.str(), out_path);
            break;
        }
    }
}

std::string report_table(const ComparisonReport& report) {
    std::ostringstream out;
    const DieScenario& s = report.scenario;
    out << "scenario: N=" << s.trials << " d=" << s.denominator
        << " mode=" << (s.mode == TossMode::exact_half ? "exact_half" : "simulated")
        << " epsilon=" << sig12(s.resolved_epsilon()) << " seed=" << s.seed << "\n\n";

    const MetaprobRun& meta = report.metaprob;
    out << "metaprobability analysis\n";
    out << "  evidence: odd " << meta.parity.successes << "/" << meta.parity.trials
        << ", large " << meta.magnitude.successes << "/" << meta.magnitude.trials << "\n";
    out << "  posterior support: " << meta.summary.support_size << " points\n";
    out << "  constraint set: " << meta.constraint_points.size() << " points capturing "
        << fixed4(meta.constraint_mass) << " of posterior mass\n";
    out << "  expected p:";
    for (double p : meta.summary.expected) out << " " << fixed4(p);
    out << "\n  top points (counts out of " << s.denominator << " / weight):\n";
    for (const auto& [index, weight] : meta.summary.top) {
        out << "    ";
        for (int k : meta.posterior.grid().point(index)) out << k << " ";
        out << "  " << fixed4(weight) << "\n";
    }

    const DsRun& ds = report.ds;
    out << "\nbelief-function analysis (epsilon = " << sig12(ds.epsilon) << ")\n";
    out << "  conflict: " << fixed4(ds.conflict) << "\n";
    out << "  classification: " << to_string(ds.classification) << "\n";
    out << "  candidate focal elements:\n";
    for (const auto& row : ds.candidates)
        out << "    " << pad(io::subset_key(row.subset), 14) << "m=" << fixed4(row.mass)
            << "  bel=" << fixed4(row.bel) << "  pl=" << fixed4(row.pl) << "\n";
    out << "  singletons (face: bel / pl, first-order bel / pl):\n";
    for (const auto& row : ds.singletons)
        out << "    " << row.label << ": " << fixed4(row.bel) << " / " << fixed4(row.pl)
            << ", " << fixed4(row.bel_linear) << " / " << fixed4(row.pl_linear) << "\n";

    out << "\nsymmetry under (1<->4)(2<->5)(3<->6): ds "
        << (report.ds_symmetric ? "yes" : "NO") << ", metaprob "
        << (report.metaprob_symmetric ? "yes" : "NO") << "\n";
    return out.str();
}

struct ExperimentOptions {
    std::string scenario_path;
    std::optional<std::uint64_t> trials;
    std::optional<int> d;
    std::optional<double> epsilon;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> seed;
    std::string true_die;
};

void run_experiment(const ExperimentOptions& opt, Format format,
                    const std::string& out_path) {
    DieScenario scenario;
    if (!opt.scenario_path.empty())
        scenario = io::scenario_from_json(load_json_file(opt.scenario_path));
    if (opt.trials) scenario.trials = *opt.trials;
    if (opt.d) scenario.denominator = *opt.d;
    if (opt.epsilon) scenario.epsilon = *opt.epsilon;
    if (opt.seed) scenario.seed = *opt.seed;
    if (opt.mode) {
        if (*opt.mode == "exact_half")
            scenario.mode = TossMode::exact_half;
        else if (*opt.mode == "simulated")
            scenario.mode = TossMode::simulated;
        else
            throw std::invalid_argument("--mode must be 'exact_half' or 'simulated'");
    }
    if (!opt.true_die.empty()) {
        const auto faces = parse_doubles_csv(opt.true_die);
        if (faces.size() != 6)
            throw std::invalid_argument("--true-die needs six comma-separated values");
        std::copy(faces.begin(), faces.end(), scenario.true_die.begin());
    }
    scenario.validate();

    const ComparisonReport report = compare(scenario);
    switch (format) {
        case Format::as_json:
            emit(io::report_to_json(report).dump(2) + "\n", out_path);
            break;
        case Format::csv:
            emit(io::meta_to_csv(report.metaprob.posterior), out_path);
            break;
        case Format::table:
            emit(report_table(report), out_path);
            break;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evcalc: belief functions and meta-level Bayes on a simplex grid"};
    app.require_subcommand(1);
    // Let --format/--out appear after the subcommand as well.
    app.fallthrough();

    std::string format;
    std::string out_path;
    ExperimentOptions exp_opt;
    app.add_option("--format", format, "output format: table, json or csv")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    app.add_option("--out", out_path, "write output to a file instead of stdout");
    app.add_option("--seed", exp_opt.seed, "toss generator seed (simulated mode)");

    std::string m1_path, m2_path;
    auto* combine =
        app.add_subcommand("combine", "combine two mass functions with Dempster's rule");
    combine->add_option("--m1", m1_path, "first mass function (JSON)")->required();
    combine->add_option("--m2", m2_path, "second mass function (JSON)")->required();

    std::string extend_mass, extend_refining;
    auto* extend =
        app.add_subcommand("extend", "vacuously extend a mass function through a refining");
    extend->add_option("--m", extend_mass, "coarse mass function (JSON)")->required();
    extend->add_option("--refining", extend_refining, "refining (JSON)")->required();

    std::string bel_mass;
    auto* bel_cmd = app.add_subcommand("bel-table", "tabulate mass, belief and plausibility");
    bel_cmd->add_option("--m", bel_mass, "mass function (JSON)")->required();

    int grid_n = 6, grid_d = 6;
    std::string grid_labels;
    auto* grid_cmd = app.add_subcommand("grid", "enumerate a simplex grid");
    grid_cmd->add_option("--n", grid_n, "number of outcomes (labels 1..n)");
    grid_cmd->add_option("--labels", grid_labels, "comma-separated outcome labels");
    grid_cmd->add_option("--d", grid_d, "grid denominator")->required();

    int update_n = 6, update_d = 6;
    std::string update_labels, evidence_path, prior_kind = "uniform", center_csv;
    double concentration = 0.0;
    auto* update_cmd =
        app.add_subcommand("update", "Bayes-update a meta-distribution on evidence");
    update_cmd->add_option("--n", update_n, "number of outcomes (labels 1..n)");
    update_cmd->add_option("--labels", update_labels, "comma-separated outcome labels");
    update_cmd->add_option("--d", update_d, "grid denominator")->required();
    update_cmd->add_option("--evidence", evidence_path, "evidence records (JSON)")
        ->required();
    update_cmd->add_option("--prior", prior_kind, "uniform (default) or peaked")
        ->check(CLI::IsMember({"uniform", "peaked"}));
    update_cmd->add_option("--center", center_csv,
                           "peaked prior center as comma-separated counts");
    update_cmd->add_option("--concentration", concentration, "peaked prior concentration");

    int filter_n = 6, filter_d = 6;
    std::string filter_labels, constraints_choice = "half-half";
    auto* filter_cmd =
        app.add_subcommand("filter", "list grid points satisfying exact constraints");
    filter_cmd->add_option("--n", filter_n, "number of outcomes (labels 1..n)");
    filter_cmd->add_option("--labels", filter_labels, "comma-separated outcome labels");
    filter_cmd->add_option("--d", filter_d, "grid denominator")->required();
    filter_cmd->add_option(
        "--constraints", constraints_choice,
        "'half-half' (alias 'paper') for the two-sensor preset, or a JSON file");

    auto* exp_cmd = app.add_subcommand(
        "die-experiment", "run both calculi on the die/two-sensor scenario");
    exp_cmd->add_option("--scenario", exp_opt.scenario_path, "scenario JSON file");
    exp_cmd->add_option("--N", exp_opt.trials, "tosses per sensor");
    exp_cmd->add_option("--d", exp_opt.d, "grid denominator");
    exp_cmd->add_option("--epsilon", exp_opt.epsilon, "sensor estimation ignorance mass");
    exp_cmd->add_option("--mode", exp_opt.mode, "exact_half (default) or simulated")
        ->check(CLI::IsMember({"exact_half", "simulated"}));
    exp_cmd->add_option("--true-die", exp_opt.true_die,
                        "six comma-separated face probabilities for simulated mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const Format fmt = resolve_format(format);
        if (app.got_subcommand(combine)) run_combine(m1_path, m2_path, fmt, out_path);
        if (app.got_subcommand(extend)) run_extend(extend_mass, extend_refining, fmt, out_path);
        if (app.got_subcommand(bel_cmd)) run_bel_table(bel_mass, fmt, out_path);
        if (app.got_subcommand(grid_cmd))
            run_grid(frame_from_options(grid_n, grid_labels), grid_d, fmt, out_path);
        if (app.got_subcommand(update_cmd))
            run_update(frame_from_options(update_n, update_labels), update_d, evidence_path,
                       prior_kind, center_csv, concentration, fmt, out_path);
        if (app.got_subcommand(filter_cmd))
            run_filter(frame_from_options(filter_n, filter_labels), filter_d,
                       constraints_choice, fmt, out_path);
        if (app.got_subcommand(exp_cmd)) run_experiment(exp_opt, fmt, out_path);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
