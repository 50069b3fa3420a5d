#include "rhlab/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "rhlab/analytic.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/probe.hpp"

namespace rhlab::sim {

namespace {

struct SeedError : std::runtime_error {
    SeedError(std::uint64_t seed, const std::exception& cause)
        : std::runtime_error("replication with seed " + std::to_string(seed) +
                             " failed: " + cause.what()) {}
};

// Mean and sample standard error of per-replication values.
std::pair<double, double> mean_and_se(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

std::size_t ExperimentConfig::target_keys() const noexcept {
    return static_cast<std::size_t>(std::floor(load.alpha() * static_cast<double>(m)));
}

void ExperimentConfig::validate() const {
    if (m < 16) {
        throw ValidationError("m must be >= 16");
    }
    if (target_keys() >= m) {
        throw ValidationError("floor(alpha * m) must be < m");
    }
    if (model == ModelKind::SteadyState && cycles > 0 && target_keys() + 2 > m) {
        throw ValidationError("churn needs room for one extra key: floor(alpha * m) + 1 < m");
    }
    if (model == ModelKind::InsertOnly && cycles != 0) {
        throw ValidationError("cycles must be 0 for the insert-only model");
    }
    if (replications < 1) {
        throw ValidationError("replications must be >= 1");
    }
}

std::vector<double> EmpiricalStats::tail_probabilities() const {
    if (n == 0 || histogram.empty()) {
        return {1.0};  // no keys: degenerate cost 1, as for an empty table
    }
    const std::uint32_t max_age = histogram.rbegin()->first;
    std::vector<double> tail(max_age, 0.0);
    std::uint64_t at_least = n;
    std::uint32_t age = 1;
    for (const auto& [a, count] : histogram) {
        for (; age <= a; ++age) tail[age - 1] = static_cast<double>(at_least) / n;
        at_least -= count;
    }
    return tail;
}

bool ComparisonReport::all_pass() const noexcept {
    return mean_pass && var_pass.value_or(true) && tail_pass.value_or(true);
}

std::uint64_t table_seed(std::uint64_t seed) noexcept { return mix64(seed ^ 0x7461626c65ULL); }
std::uint64_t key_stream_seed(std::uint64_t seed) noexcept { return mix64(seed ^ 0x6b657973ULL); }
std::uint64_t deletion_seed(std::uint64_t seed) noexcept { return mix64(seed ^ 0x64656c65ULL); }

KeySource::KeySource(std::uint64_t seed) noexcept : offset_(mix64(seed)) {}

std::uint64_t KeySource::next() noexcept {
    // mix64 is a bijection, so distinct counters give distinct keys.
    return mix64(offset_ + counter_++);
}

Table fill(const ExperimentConfig& config, std::uint64_t seed, KeySource& keys) {
    config.validate();
    Table table(config.m, config.discipline, table_seed(seed));
    const std::size_t target = config.target_keys();
    for (std::size_t i = 0; i < target; ++i) {
        table.insert(keys.next());
    }
    return table;
}

Table fill(const ExperimentConfig& config, std::uint64_t seed) {
    KeySource keys(key_stream_seed(seed));
    return fill(config, seed, keys);
}

Table fill(const ExperimentConfig& config) { return fill(config, config.base_seed); }

Table steady_state(const ExperimentConfig& config, std::uint64_t seed,
                   const std::function<void(std::uint64_t, const Table&)>& on_cycle) {
    KeySource keys(key_stream_seed(seed));
    Table table = fill(config, seed, keys);
    CounterRng rng(deletion_seed(seed));
    for (std::uint64_t c = 1; c <= config.cycles; ++c) {
        table.insert(keys.next());
        table.delete_random(rng);
        if (on_cycle) on_cycle(c, table);
    }
    return table;
}

Table steady_state(const ExperimentConfig& config) { return steady_state(config, config.base_seed); }

std::vector<EmpiricalStats> steady_state_snapshots(const ExperimentConfig& config,
                                                   std::uint64_t seed,
                                                   std::span<const std::uint64_t> checkpoints) {
    std::vector<std::uint64_t> sorted(checkpoints.begin(), checkpoints.end());
    std::sort(sorted.begin(), sorted.end());
    ExperimentConfig churn = config;
    churn.model = ModelKind::SteadyState;
    churn.cycles = sorted.empty() ? 0 : sorted.back();

    std::vector<std::pair<std::uint64_t, EmpiricalStats>> taken;
    std::size_t next = 0;
    const auto record = [&](std::uint64_t cycle, const Table& table) {
        while (next < sorted.size() && sorted[next] == cycle) {
            taken.emplace_back(cycle, measure(table));
            ++next;
        }
    };
    if (!sorted.empty() && sorted.front() == 0) {
        const Table filled = fill(churn, seed);
        record(0, filled);
    }
    steady_state(churn, seed, [&](std::uint64_t c, const Table& t) { record(c, t); });

    std::vector<EmpiricalStats> out;
    out.reserve(checkpoints.size());
    for (const std::uint64_t want : checkpoints) {
        const auto it = std::find_if(taken.begin(), taken.end(),
                                     [&](const auto& p) { return p.first == want; });
        if (it == taken.end()) {
            throw ValidationError("steady_state_snapshots: checkpoint " + std::to_string(want) +
                                  " was not reached");
        }
        out.push_back(it->second);
    }
    return out;
}

EmpiricalStats measure_ages(std::span<const std::uint32_t> ages) {
    if (ages.empty()) {
        throw ValidationError("measure: table is empty");
    }
    EmpiricalStats stats;
    stats.n = ages.size();
    double sum = 0.0;
    for (const std::uint32_t a : ages) {
        sum += a;
        ++stats.histogram[a];
    }
    stats.mean_age = sum / static_cast<double>(stats.n);
    double ss = 0.0;
    for (const std::uint32_t a : ages) {
        const double d = a - stats.mean_age;
        ss += d * d;
    }
    stats.var_age = ss / static_cast<double>(stats.n);
    return stats;
}

EmpiricalStats measure(const Table& table) {
    std::vector<std::uint32_t> ages;
    ages.reserve(table.size());
    for (const std::uint32_t s : table.live_slots()) {
        ages.push_back(table.slots()[s].age);
    }
    return measure_ages(ages);
}

double tail_sup_diff(const EmpiricalStats& a, const EmpiricalStats& b) {
    const auto ta = a.tail_probabilities();
    const auto tb = b.tail_probabilities();
    double sup = 0.0;
    for (std::size_t i = 0; i < std::max(ta.size(), tb.size()); ++i) {
        const double x = i < ta.size() ? ta[i] : 0.0;
        const double y = i < tb.size() ? tb[i] : 0.0;
        sup = std::max(sup, std::abs(x - y));
    }
    return sup;
}

ComparisonReport compare(const EmpiricalStats& stats, LoadFactor load, ModelKind model,
                         Discipline discipline, double epsilon, const Tolerances& tol) {
    ComparisonReport report;
    report.analytic_mean = analytic::mean_search_cost(load, model);
    report.empirical_mean = stats.mean_age;
    report.empirical_var = stats.var_age;
    report.n = stats.n;
    report.pooled_n = stats.n;
    report.replication_means = {stats.mean_age};
    report.replication_vars = {stats.var_age};

    const double alpha = load.alpha();
    std::vector<double> analytic_tail;
    if (alpha == 0.0) {
        report.analytic_var = 0.0;
        analytic_tail = {1.0};
    } else if (discipline == Discipline::RH) {
        report.analytic_var = analytic::variance_search_cost(load, model, epsilon).variance;
        analytic_tail = analytic::tail_probabilities(analytic::rh_tails(load, model, epsilon));
    } else if (model == ModelKind::SteadyState) {
        report.analytic_var = alpha / ((1.0 - alpha) * (1.0 - alpha));
        // Geometric law: Pr{X >= i} = alpha^(i-1), cut where it falls below epsilon.
        for (double t = 1.0; t >= epsilon; t *= alpha) analytic_tail.push_back(t);
    }

    report.mean_rel_err = std::abs(stats.mean_age - report.analytic_mean) / report.analytic_mean;
    report.mean_pass = report.mean_rel_err <= tol.mean_rel;
    if (report.analytic_var) {
        const double v = *report.analytic_var;
        report.var_rel_err = v > 0.0 ? std::abs(stats.var_age - v) / v : std::abs(stats.var_age);
        report.var_pass = *report.var_rel_err <= tol.var_rel;
    }
    if (!analytic_tail.empty()) {
        const auto empirical = stats.tail_probabilities();
        double sup = 0.0;
        double max_z = 0.0;
        for (std::size_t i = 0; i < std::max(empirical.size(), analytic_tail.size()); ++i) {
            const double e = i < empirical.size() ? empirical[i] : 0.0;
            const double p = i < analytic_tail.size() ? analytic_tail[i] : 0.0;
            const double diff = std::abs(e - p);
            sup = std::max(sup, diff);
            if (p > 0.0 && p < 1.0 && stats.n > 0) {
                max_z = std::max(max_z, diff / std::sqrt(p * (1.0 - p) / static_cast<double>(stats.n)));
            }
        }
        report.tail_sup_diff = std::min(sup, 1.0);
        report.tail_max_z = max_z;
        report.tail_pass = sup <= tol.tail_sup;
    }
    return report;
}

SearchCostResult search_cost_experiment(const Table& table, std::size_t sample_size, double center,
                                        std::uint64_t seed) {
    if (sample_size > table.size()) {
        throw ValidationError("sample size " + std::to_string(sample_size) +
                              " exceeds the number of keys " + std::to_string(table.size()));
    }
    if (sample_size == 0) {
        throw ValidationError("sample size must be >= 1");
    }
    // Partial Fisher-Yates over a copy of the registry.
    std::vector<std::uint32_t> pool = table.live_slots();
    CounterRng rng(seed);
    double standard = 0.0;
    double centered = 0.0;
    double ages = 0.0;
    for (std::size_t i = 0; i < sample_size; ++i) {
        const std::size_t j = i + rng.below(pool.size() - i);
        std::swap(pool[i], pool[j]);
        const Slot& s = table.slots()[pool[i]];
        standard += table.search_standard(s.key);
        centered += static_cast<double>(table.search_mean_centered(s.key, center));
        ages += s.age;
    }
    const double k = static_cast<double>(sample_size);
    return {standard / k, centered / k, ages / k, sample_size};
}

EmpiricalStats run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
    const Table table = config.model == ModelKind::InsertOnly ? fill(config, seed)
                                                              : steady_state(config, seed);
    if (table.size() == 0) {
        // alpha = 0: every search succeeds on its first probe.
        return EmpiricalStats{0, 1.0, 0.0, {}};
    }
    return measure(table);
}

std::size_t default_thread_count() {
    if (const char* env = std::getenv("RHLAB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

ComparisonReport replicate(const ExperimentConfig& config, const Experiment& experiment,
                           double epsilon, const Tolerances& tol, std::size_t threads) {
    config.validate();
    const std::size_t r = config.replications;
    std::vector<EmpiricalStats> results(r);
    std::vector<std::exception_ptr> errors(r);
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t i = next++; i < r; i = next++) {
            try {
                results[i] = experiment(config, config.base_seed + i);
            } catch (const std::exception& e) {
                errors[i] = std::make_exception_ptr(SeedError(config.base_seed + i, e));
            }
        }
    };
    const std::size_t workers = std::min(r, threads == 0 ? default_thread_count() : threads);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    // Seed-ordered merge.
    EmpiricalStats pooled;
    std::vector<double> means, vars;
    for (const EmpiricalStats& s : results) {
        pooled.n += s.n;
        for (const auto& [age, count] : s.histogram) pooled.histogram[age] += count;
        means.push_back(s.mean_age);
        vars.push_back(s.var_age);
    }
    pooled.mean_age = mean_and_se(means).first;
    pooled.var_age = mean_and_se(vars).first;

    ComparisonReport report =
        compare(pooled, config.load, config.model, config.discipline, epsilon, tol);
    report.n = results.front().n;
    std::tie(report.empirical_mean, report.empirical_mean_se) = mean_and_se(means);
    std::tie(report.empirical_var, report.empirical_var_se) = mean_and_se(vars);
    report.replication_means = std::move(means);
    report.replication_vars = std::move(vars);
    for (std::size_t i = 0; i < r; ++i) report.replication_seeds.push_back(config.base_seed + i);
    return report;
}

}  // namespace rhlab::sim
