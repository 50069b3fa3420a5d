#include "rhlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rhlab/analytic.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/simulator.hpp"
#include "rhlab/version.hpp"

namespace rhlab::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

enum class Format { CSV, JSON };

// Failed post-condition of a computed result; maps to exit code 1.
struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string flag(bool b) { return b ? "true" : "false"; }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string opt_flag(const std::optional<bool>& v) { return v ? flag(*v) : ""; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json opt_json(const std::optional<bool>& v) { return v ? json(*v) : json(nullptr); }

json header(const char* schema) {
    return json{{"schema_version", schema}, {"library_version", kVersion}};
}

// Sends a finished document to --out or to the fallback stream.
void emit(const std::string& text, const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
    file << text;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void add_format(CLI::App* cmd, Format& format) {
    cmd->add_option("--format", format, "Output format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, Format>{{"csv", Format::CSV}, {"json", Format::JSON}},
            CLI::ignore_case));
}

void add_model(CLI::App* cmd, std::string& model) {
    cmd->add_option("--model", model, "insert-only | steady-state")
        ->check(CLI::IsMember({"insert-only", "steady-state"}));
}

void add_discipline(CLI::App* cmd, std::string& discipline) {
    cmd->add_option("--discipline", discipline, "fcfs | lcfs | rh")
        ->check(CLI::IsMember({"fcfs", "lcfs", "rh"}, CLI::ignore_case));
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) {
            throw ValidationError("bad grid value '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw ValidationError("empty grid");
    }
    return out;
}

// ---------------------------------------------------------------- dist

struct DistArgs {
    double alpha = 0.0;
    std::string model = "insert-only";
    double epsilon = 1e-12;
    Format format = Format::CSV;
    std::string out;
};

int run_dist(const DistArgs& a, std::ostream& out) {
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) {
        throw ValidationError("--alpha must lie in (0, 1)");
    }
    const LoadFactor load(a.alpha);
    const ModelKind model = parse_model(a.model);
    const auto tails = analytic::rh_tails(load, model, a.epsilon);
    const auto p = analytic::distribution(tails);
    for (std::size_t i = 1; i < tails.size(); ++i) {
        if (!(tails.values[i] < tails.values[i - 1]) || !(tails.values[i] > 0.0)) {
            throw CheckFailure("double tails are not strictly decreasing and positive");
        }
    }

    if (a.format == Format::CSV) {
        std::ostringstream csv;
        csv << "i,p,tail,double_tail\n";
        for (std::size_t i = 1; i <= tails.size(); ++i) {
            csv << i << ',' << num(p[i - 1]) << ',' << num(tails.single_tail(i)) << ','
                << num(tails.double_tail(i)) << '\n';
        }
        emit(csv.str(), a.out, out);
    } else {
        json doc = header("rhlab.dist/1");
        doc["config"] = {{"alpha", a.alpha}, {"beta", load.beta()}, {"model", a.model},
                         {"epsilon", a.epsilon}};
        doc["remainder_bound"] = tails.remainder_bound;
        json rows = json::array();
        for (std::size_t i = 1; i <= tails.size(); ++i) {
            rows.push_back({{"i", i},
                            {"p", p[i - 1]},
                            {"tail", tails.single_tail(i)},
                            {"double_tail", tails.double_tail(i)}});
        }
        doc["rows"] = std::move(rows);
        emit(dump(doc), a.out, out);
    }
    return kSuccess;
}

// ---------------------------------------------------------------- bounds

struct BoundsArgs {
    std::string alpha_grid;
    std::string beta_grid;
    std::string model = "insert-only";
    double epsilon = 1e-12;
    Format format = Format::CSV;
    std::string out;
};

int run_bounds(const BoundsArgs& a, std::ostream& out) {
    if (!a.alpha_grid.empty() && !a.beta_grid.empty()) {
        throw ValidationError("give either --alpha-grid or --beta-grid, not both");
    }
    std::vector<LoadFactor> grid;
    if (!a.beta_grid.empty()) {
        for (const double b : parse_grid(a.beta_grid)) {
            if (!(b > 1.0)) throw ValidationError("--beta-grid values must exceed 1");
            grid.push_back(LoadFactor::from_beta(b));
        }
    } else {
        const std::string text =
            a.alpha_grid.empty() ? "0.1,0.5,0.9,0.99,0.999,0.999999" : a.alpha_grid;
        for (const double al : parse_grid(text)) {
            if (!(al > 0.0 && al < 1.0)) throw ValidationError("--alpha-grid values must lie in (0, 1)");
            grid.emplace_back(al);
        }
    }
    const ModelKind model = parse_model(a.model);

    struct Row {
        LoadFactor load;
        analytic::Moments moments;
        double bound;
    };
    std::vector<Row> rows;
    bool dominated = true;
    for (const LoadFactor& lf : grid) {
        Row r{lf, analytic::variance_search_cost(lf, model, a.epsilon),
              analytic::variance_upper_bound(lf, model)};
        dominated = dominated && r.bound - r.moments.variance >= 0.0;
        rows.push_back(r);
    }

    if (a.format == Format::CSV) {
        std::ostringstream csv;
        csv << "alpha,beta,mean,variance,variance_upper_bound,bound_minus_variance\n";
        for (const Row& r : rows) {
            csv << num(r.load.alpha()) << ',' << num(r.load.beta()) << ',' << num(r.moments.mean)
                << ',' << num(r.moments.variance) << ',' << num(r.bound) << ','
                << num(r.bound - r.moments.variance) << '\n';
        }
        emit(csv.str(), a.out, out);
    } else {
        json doc = header("rhlab.bounds/1");
        doc["config"] = {{"model", a.model}, {"epsilon", a.epsilon}};
        json arr = json::array();
        for (const Row& r : rows) {
            arr.push_back({{"alpha", r.load.alpha()},
                           {"beta", r.load.beta()},
                           {"mean", r.moments.mean},
                           {"variance", r.moments.variance},
                           {"truncation_error", r.moments.truncation_error},
                           {"variance_upper_bound", r.bound},
                           {"bound_minus_variance", r.bound - r.moments.variance}});
        }
        doc["rows"] = std::move(arr);
        emit(dump(doc), a.out, out);
    }
    return dominated ? kSuccess : kCheckFailed;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::size_t m = 100000;
    double alpha = 0.9;
    std::string discipline = "rh";
    std::string model = "insert-only";
    std::optional<std::uint64_t> cycles;
    std::size_t replications = 5;
    std::uint64_t seed = 0;
    double epsilon = 1e-12;
    sim::Tolerances tol;
    Format format = Format::CSV;
    std::string out;
    bool timing = false;
};

int run_simulate(const SimulateArgs& a, std::ostream& out) {
    const auto start = Clock::now();
    sim::ExperimentConfig config;
    config.m = a.m;
    config.load = LoadFactor(a.alpha);
    config.discipline = parse_discipline(a.discipline);
    config.model = parse_model(a.model);
    config.cycles = a.cycles.value_or(config.model == ModelKind::SteadyState ? 10 * a.m : 0);
    config.replications = a.replications;
    config.base_seed = a.seed;
    config.validate();

    const sim::ComparisonReport r =
        sim::replicate(config, sim::run_experiment, a.epsilon, a.tol);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();

    if (a.format == Format::CSV) {
        std::ostringstream csv;
        csv << "m,alpha,discipline,model,cycles,replications,seed,epsilon,n,analytic_mean,"
               "analytic_var,empirical_mean,empirical_mean_se,empirical_var,empirical_var_se,"
               "mean_rel_err,var_rel_err,tail_sup_diff,tail_max_z,mean_pass,var_pass,tail_pass,"
               "all_pass\n";
        csv << config.m << ',' << num(a.alpha) << ',' << to_string(config.discipline) << ','
            << to_string(config.model) << ',' << config.cycles << ',' << config.replications << ','
            << config.base_seed << ',' << num(a.epsilon) << ',' << r.n << ','
            << num(r.analytic_mean) << ',' << opt_num(r.analytic_var) << ','
            << num(r.empirical_mean) << ',' << num(r.empirical_mean_se) << ','
            << num(r.empirical_var) << ',' << num(r.empirical_var_se) << ','
            << num(r.mean_rel_err) << ',' << opt_num(r.var_rel_err) << ','
            << opt_num(r.tail_sup_diff) << ',' << opt_num(r.tail_max_z) << ','
            << flag(r.mean_pass) << ',' << opt_flag(r.var_pass) << ',' << opt_flag(r.tail_pass)
            << ',' << flag(r.all_pass()) << '\n';
        emit(csv.str(), a.out, out);
    } else {
        json doc = header("rhlab.simulate/1");
        doc["config"] = {{"m", config.m},
                         {"alpha", a.alpha},
                         {"discipline", to_string(config.discipline)},
                         {"model", to_string(config.model)},
                         {"cycles", config.cycles},
                         {"replications", config.replications},
                         {"seed", config.base_seed},
                         {"epsilon", a.epsilon},
                         {"tolerances",
                          {{"mean_rel", a.tol.mean_rel},
                           {"var_rel", a.tol.var_rel},
                           {"tail_sup", a.tol.tail_sup}}}};
        doc["report"] = {{"n", r.n},
                         {"pooled_n", r.pooled_n},
                         {"analytic_mean", r.analytic_mean},
                         {"analytic_var", opt_json(r.analytic_var)},
                         {"empirical_mean", r.empirical_mean},
                         {"empirical_mean_se", r.empirical_mean_se},
                         {"empirical_var", r.empirical_var},
                         {"empirical_var_se", r.empirical_var_se},
                         {"mean_rel_err", r.mean_rel_err},
                         {"var_rel_err", opt_json(r.var_rel_err)},
                         {"tail_sup_diff", opt_json(r.tail_sup_diff)},
                         {"tail_max_z", opt_json(r.tail_max_z)},
                         {"mean_pass", r.mean_pass},
                         {"var_pass", opt_json(r.var_pass)},
                         {"tail_pass", opt_json(r.tail_pass)},
                         {"all_pass", r.all_pass()},
                         {"replication_seeds", r.replication_seeds},
                         {"replication_means", r.replication_means},
                         {"replication_vars", r.replication_vars}};
        if (a.timing) {
            doc["wall_clock_seconds"] = seconds;
        }
        emit(dump(doc), a.out, out);
    }
    return r.all_pass() ? kSuccess : kCheckFailed;
}

// ---------------------------------------------------------------- searchbench

struct SearchArgs {
    std::size_t m = 100000;
    double alpha = 0.9;
    std::string discipline = "rh";
    std::size_t sample = 10000;
    std::uint64_t seed = 0;
    Format format = Format::CSV;
    std::string out;
};

int run_searchbench(const SearchArgs& a, std::ostream& out) {
    sim::ExperimentConfig config;
    config.m = a.m;
    config.load = LoadFactor(a.alpha);
    config.discipline = parse_discipline(a.discipline);
    config.model = ModelKind::InsertOnly;
    config.base_seed = a.seed;
    config.sample_size = a.sample;
    config.validate();
    if (a.sample == 0 || a.sample > config.target_keys()) {
        throw ValidationError("--sample must be between 1 and floor(alpha * m) = " +
                              std::to_string(config.target_keys()));
    }

    const double mu = analytic::mean_search_cost(config.load, ModelKind::InsertOnly);
    const double sd = std::sqrt(
        analytic::variance_search_cost(config.load, ModelKind::InsertOnly).variance);
    const Table table = sim::fill(config);
    const sim::SearchCostResult r =
        sim::search_cost_experiment(table, a.sample, mu, sim::deletion_seed(a.seed));
    if (r.standard_mean != r.sampled_mean_age) {
        throw CheckFailure("standard search cost differs from the stored ages");
    }

    if (a.format == Format::CSV) {
        std::ostringstream csv;
        csv << "mode,mean_probes,analytic_mean,analytic_sd\n";
        csv << "standard," << num(r.standard_mean) << ',' << num(mu) << ',' << num(sd) << '\n';
        csv << "centered," << num(r.centered_mean) << ',' << num(mu) << ',' << num(sd) << '\n';
        emit(csv.str(), a.out, out);
    } else {
        json doc = header("rhlab.searchbench/1");
        doc["config"] = {{"m", a.m},
                         {"alpha", a.alpha},
                         {"discipline", to_string(config.discipline)},
                         {"sample", a.sample},
                         {"seed", a.seed},
                         {"center", mu}};
        doc["analytic_mean"] = mu;
        doc["analytic_sd"] = sd;
        doc["rows"] = json::array({{{"mode", "standard"}, {"mean_probes", r.standard_mean}},
                                   {{"mode", "centered"}, {"mean_probes", r.centered_mean}}});
        emit(dump(doc), a.out, out);
    }
    return kSuccess;
}

// ---------------------------------------------------------------- figures

struct FigureArgs {
    std::string which;
    std::string out_dir = ".";
    std::size_t m = 100000;
    std::uint64_t seed = 0;
};

std::string figure1() {
    const LoadFactor load = LoadFactor::from_beta(10.0);
    const auto tails = analytic::rh_tails(load, ModelKind::InsertOnly);
    std::ostringstream csv;
    csv << "i,double_tail,majorant\n";
    for (int i = 1; i <= 10; ++i) {
        csv << i << ',' << num(tails.double_tail(i)) << ','
            << num(analytic::ode_majorant(i, load, ModelKind::InsertOnly)) << '\n';
    }
    return csv.str();
}

std::string figure2(std::size_t m, std::uint64_t seed) {
    constexpr double kAlpha = 0.99;
    constexpr int kMaxAge = 150;
    const LoadFactor load(kAlpha);
    const auto rh = analytic::distribution(analytic::rh_tails(load, ModelKind::SteadyState));

    const auto simulated = [&](Discipline d) {
        sim::ExperimentConfig config;
        config.m = m;
        config.load = load;
        config.discipline = d;
        config.model = ModelKind::SteadyState;
        config.cycles = 10 * m;
        config.base_seed = seed;
        return sim::measure(sim::steady_state(config));
    };
    const sim::EmpiricalStats fcfs = simulated(Discipline::FCFS);
    const sim::EmpiricalStats lcfs = simulated(Discipline::LCFS);
    const auto freq = [](const sim::EmpiricalStats& s, std::uint32_t age) {
        const auto it = s.histogram.find(age);
        return it == s.histogram.end() ? 0.0 : static_cast<double>(it->second) / s.n;
    };

    std::ostringstream csv;
    csv << "i,fcfs_simulated,lcfs_simulated,rh_analytic\n";
    for (int i = 1; i <= kMaxAge; ++i) {
        const double p = static_cast<std::size_t>(i) <= rh.size() ? rh[i - 1] : 0.0;
        csv << i << ',' << num(freq(fcfs, i)) << ',' << num(freq(lcfs, i)) << ',' << num(p)
            << '\n';
    }
    return csv.str();
}

std::string figure4(bool& dominated) {
    std::ostringstream csv;
    csv << "beta,alpha,variance,beta_line,variance_upper_bound\n";
    dominated = true;
    for (int b = 1; b <= 100; ++b) {
        const LoadFactor load = LoadFactor::from_beta(b);
        double var = 0.0;
        double bound = b + 1.0 / 3.0;
        if (load.alpha() > 0.0) {
            var = analytic::variance_search_cost(load, ModelKind::SteadyState).variance;
            bound = analytic::variance_upper_bound(load, ModelKind::SteadyState);
        }
        dominated = dominated && var <= bound;
        csv << b << ',' << num(load.alpha()) << ',' << num(var) << ',' << b << ',' << num(bound)
            << '\n';
    }
    return csv.str();
}

int run_figures(const FigureArgs& a) {
    std::filesystem::create_directories(a.out_dir);
    const std::filesystem::path dir(a.out_dir);
    bool ok = true;
    std::string text;
    if (a.which == "fig1") {
        text = figure1();
    } else if (a.which == "fig2") {
        if (a.m < 16) throw ValidationError("--m must be >= 16");
        text = figure2(a.m, a.seed);
    } else if (a.which == "fig4") {
        text = figure4(ok);
    } else {
        throw ValidationError("unknown figure '" + a.which + "'");
    }
    emit(text, (dir / (a.which + ".csv")).string(), std::cout);
    return ok ? kSuccess : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robin Hood hashing laboratory: search-cost distributions, bounds and simulation",
                 "rhlab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    DistArgs dist;
    auto* c_dist = app.add_subcommand("dist", "Search-cost distribution from the tail recurrence");
    c_dist->add_option("--alpha", dist.alpha, "Load factor in (0, 1)")->required();
    add_model(c_dist, dist.model);
    c_dist->add_option("--epsilon", dist.epsilon, "Truncation threshold");
    add_format(c_dist, dist.format);
    c_dist->add_option("--out", dist.out, "Output file (default stdout)");

    BoundsArgs bounds;
    auto* c_bounds = app.add_subcommand("bounds", "Variance against its majorant bound");
    c_bounds->add_option("--alpha-grid", bounds.alpha_grid, "Comma-separated load factors");
    c_bounds->add_option("--beta-grid", bounds.beta_grid, "Comma-separated beta = 1/(1-alpha)");
    add_model(c_bounds, bounds.model);
    c_bounds->add_option("--epsilon", bounds.epsilon, "Truncation threshold");
    add_format(c_bounds, bounds.format);
    c_bounds->add_option("--out", bounds.out, "Output file (default stdout)");

    SimulateArgs simulate;
    std::uint64_t cycles = 0;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo comparison against the analytic model");
    c_sim->add_option("--m", simulate.m, "Table size");
    c_sim->add_option("--alpha", simulate.alpha, "Load factor in [0, 1)");
    add_discipline(c_sim, simulate.discipline);
    add_model(c_sim, simulate.model);
    auto* cycles_opt = c_sim->add_option("--cycles", cycles, "Insert/delete rounds (default 10*m)");
    c_sim->add_option("--replications", simulate.replications, "Independent replications");
    c_sim->add_option("--seed", simulate.seed, "Base seed");
    c_sim->add_option("--epsilon", simulate.epsilon, "Truncation threshold");
    c_sim->add_option("--mean-tol", simulate.tol.mean_rel, "Relative tolerance on the mean");
    c_sim->add_option("--var-tol", simulate.tol.var_rel, "Relative tolerance on the variance");
    c_sim->add_option("--tail-tol", simulate.tol.tail_sup, "Tolerance on the tail sup distance");
    add_format(c_sim, simulate.format);
    c_sim->add_option("--out", simulate.out, "Output file (default stdout)");
    c_sim->add_flag("--timing", simulate.timing, "Record wall-clock duration in JSON output");

    SearchArgs search;
    auto* c_search = app.add_subcommand("searchbench", "Standard versus mean-centered search cost");
    c_search->add_option("--m", search.m, "Table size");
    c_search->add_option("--alpha", search.alpha, "Load factor in [0, 1)");
    add_discipline(c_search, search.discipline);
    c_search->add_option("--sample", search.sample, "Keys sampled without replacement");
    c_search->add_option("--seed", search.seed, "Seed");
    add_format(c_search, search.format);
    c_search->add_option("--out", search.out, "Output file (default stdout)");

    FigureArgs figures;
    auto* c_fig = app.add_subcommand("figures", "Plot-ready CSV data for the reference figures");
    c_fig->add_option("--which", figures.which, "fig1 | fig2 | fig4")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2", "fig4"}));
    c_fig->add_option("--out-dir", figures.out_dir, "Directory for <which>.csv");
    c_fig->add_option("--m", figures.m, "Table size for simulated curves (fig2)");
    c_fig->add_option("--seed", figures.seed, "Seed for simulated curves (fig2)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "rhlab: " << e.what() << '\n';
        return kBadArguments;
    }

    try {
        if (*c_dist) return run_dist(dist, out);
        if (*c_bounds) return run_bounds(bounds, out);
        if (*c_sim) {
            if (cycles_opt->count() > 0) simulate.cycles = cycles;
            return run_simulate(simulate, out);
        }
        if (*c_search) return run_searchbench(search, out);
        if (*c_fig) return run_figures(figures);
    } catch (const ValidationError& e) {
        err << "rhlab: " << e.what() << '\n';
        return kBadArguments;
    } catch (const CheckFailure& e) {
        err << "rhlab: check failed: " << e.what() << '\n';
        return kCheckFailed;
    } catch (const std::exception& e) {
        err << "rhlab: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kBadArguments;
}

}  // namespace rhlab::cli
