#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rhlab/hashtable.hpp"
#include "rhlab/load_factor.hpp"

namespace rhlab::sim {

struct ExperimentConfig {
    std::size_t m = 100000;
    LoadFactor load{0.9};
    Discipline discipline = Discipline::RH;
    ModelKind model = ModelKind::InsertOnly;
    std::uint64_t cycles = 0;  ///< insert/delete pairs after the fill (SteadyState only)
    std::size_t replications = 1;
    std::uint64_t base_seed = 0;
    std::size_t sample_size = 0;

    /// Number of keys inserted by fill(): floor(alpha * m).
    std::size_t target_keys() const noexcept;

    /// Throws ValidationError on an inconsistent configuration.
    void validate() const;
};

struct EmpiricalStats {
    std::uint64_t n = 0;
    double mean_age = 0.0;
    double var_age = 0.0;  ///< population variance
    std::map<std::uint32_t, std::uint64_t> histogram;

    /// Pr{X >= i} for i = 1..max age.
    std::vector<double> tail_probabilities() const;
};

struct Tolerances {
    double mean_rel = 0.02;
    double var_rel = 0.10;
    double tail_sup = 0.01;
};

struct ComparisonReport {
    double analytic_mean = 0.0;
    std::optional<double> analytic_var;  ///< absent where no closed model exists
    double empirical_mean = 0.0;
    double empirical_mean_se = 0.0;
    double empirical_var = 0.0;
    double empirical_var_se = 0.0;
    std::uint64_t n = 0;  ///< keys per replication (pooled total in `pooled_n`)
    std::uint64_t pooled_n = 0;
    std::optional<double> tail_sup_diff;
    /// max_i |empirical - analytic| / sqrt(p(1-p)/pooled_n) over ages with 0 < p < 1.
    std::optional<double> tail_max_z;
    double mean_rel_err = 0.0;
    std::optional<double> var_rel_err;
    bool mean_pass = false;
    std::optional<bool> var_pass;
    std::optional<bool> tail_pass;
    std::vector<double> replication_means;
    std::vector<double> replication_vars;
    std::vector<std::uint64_t> replication_seeds;

    /// True when every comparison that could be made passed.
    bool all_pass() const noexcept;
};

/// Seed-derived streams. Each replication seed fans out into independent
/// table, key and deletion streams.
std::uint64_t table_seed(std::uint64_t seed) noexcept;
std::uint64_t key_stream_seed(std::uint64_t seed) noexcept;
std::uint64_t deletion_seed(std::uint64_t seed) noexcept;

/// Sequential synthetic keys scrambled through the seed; never repeats.
class KeySource {
public:
    explicit KeySource(std::uint64_t seed) noexcept;
    std::uint64_t next() noexcept;
    std::uint64_t issued() const noexcept { return counter_; }

private:
    std::uint64_t offset_;
    std::uint64_t counter_ = 0;
};

/// Inserts floor(alpha * m) fresh keys into an empty table built from `seed`.
Table fill(const ExperimentConfig& config, std::uint64_t seed, KeySource& keys);
Table fill(const ExperimentConfig& config, std::uint64_t seed);
Table fill(const ExperimentConfig& config);

/// Fill, then `config.cycles` rounds of {insert fresh key; delete random key}.
/// `on_cycle` (optional) runs after every completed round with the 1-based
/// round number.
Table steady_state(const ExperimentConfig& config, std::uint64_t seed,
                   const std::function<void(std::uint64_t, const Table&)>& on_cycle = {});
Table steady_state(const ExperimentConfig& config);

/// Measures the age distribution at each requested round of churn.
std::vector<EmpiricalStats> steady_state_snapshots(const ExperimentConfig& config,
                                                   std::uint64_t seed,
                                                   std::span<const std::uint64_t> checkpoints);

EmpiricalStats measure(const Table& table);
EmpiricalStats measure_ages(std::span<const std::uint32_t> ages);

/// Compares measured statistics with the analytic model for the discipline.
///
/// RH uses the double-tail recurrence of `model`. FCFS and LCFS under churn
/// use the geometric law Pr{X >= i} = alpha^(i-1) (variance alpha/(1-alpha)^2);
/// insert-only FCFS/LCFS are compared on the mean only.
ComparisonReport compare(const EmpiricalStats& stats, LoadFactor load, ModelKind model,
                         Discipline discipline = Discipline::RH, double epsilon = 1e-12,
                         const Tolerances& tol = {});

/// Sup distance between the tail functions of two measurements.
double tail_sup_diff(const EmpiricalStats& a, const EmpiricalStats& b);

struct SearchCostResult {
    double standard_mean = 0.0;
    double centered_mean = 0.0;
    double sampled_mean_age = 0.0;
    std::size_t sample_size = 0;
};

/// Samples keys without replacement from the live registry and averages the
/// probe counts of standard and mean-centered search.
SearchCostResult search_cost_experiment(const Table& table, std::size_t sample_size, double center,
                                        std::uint64_t seed);

/// One replication: seed in, measured statistics out.
using Experiment = std::function<EmpiricalStats(const ExperimentConfig&, std::uint64_t seed)>;

/// Default experiment: fill (InsertOnly) or steady_state (SteadyState), then measure.
EmpiricalStats run_experiment(const ExperimentConfig& config, std::uint64_t seed);

/// Worker count for replicate(): RHLAB_THREADS if set, else hardware concurrency.
std::size_t default_thread_count();

/// Runs replications with seeds base_seed + 0 .. base_seed + r - 1 and merges
/// them in seed order, so the report is independent of scheduling.
ComparisonReport replicate(const ExperimentConfig& config, const Experiment& experiment = run_experiment,
                           double epsilon = 1e-12, const Tolerances& tol = {},
                           std::size_t threads = 0);

}  // namespace rhlab::sim
