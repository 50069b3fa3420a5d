// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "rhlab/analytic.hpp"
#include "rhlab/numeric.hpp"
#include "rhlab/simulator.hpp"

using namespace rhlab;
namespace an = rhlab::analytic;
namespace sim = rhlab::sim;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

const std::array<double, 6> kAlphaGrid{0.1, 0.5, 0.9, 0.99, 0.999, 1.0 - 1e-6};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

int failures = 0;

// Runs one criterion; a runtime limit of 0 means none is stated.
void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = out.ok;
    std::string timing = fmt("%.3gs", secs);
    if (limit_s > 0.0) {
        timing += fmt(" (limit %gs)", limit_s);
        if (secs >= limit_s) {
            ok = false;
            timing += " too slow";
        }
    }
    if (!ok) ++failures;
    std::printf("%s C%d %s: %s [%s]\n", ok ? "PASS" : "FAIL", id, title, out.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
}

sim::ExperimentConfig config(std::size_t m, double alpha, Discipline d, ModelKind model,
                             std::uint64_t cycles, std::size_t reps) {
    sim::ExperimentConfig c;
    c.m = m;
    c.load = LoadFactor(alpha);
    c.discipline = d;
    c.model = model;
    c.cycles = cycles;
    c.replications = reps;
    c.base_seed = 1;
    return c;
}

Outcome c1() {
    const auto t = an::rh_tails(LoadFactor(0.9), ModelKind::InsertOnly);
    const std::array<double, 4> want{2.3026, 1.4026, 0.6486, 0.1714};
    double worst = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) {
        worst = std::max(worst, std::abs(t.double_tail(i + 1) - want[i]));
    }
    return {worst <= 5e-4, "q1..4 = " + fmt("%.6f", t.double_tail(1)) + ", " + fmt("%.6f", t.double_tail(2)) +
                               ", " + fmt("%.6f", t.double_tail(3)) + ", " + fmt("%.6f", t.double_tail(4)) +
                               "; max deviation " + fmt("%.2e", worst)};
}

Outcome c2() {
    const double v = an::variance_search_cost(LoadFactor(1.0 - 1e-6), ModelKind::InsertOnly, 1e-12).variance;
    return {v >= 1.87 && v <= 1.90, "variance " + fmt("%.6f", v) + " in [1.87, 1.90]"};
}

Outcome c3() {
    const double b = an::variance_upper_bound(LoadFactor::from_beta(1e6), ModelKind::InsertOnly);
    bool ok = std::abs(b - 3.6232) <= 1e-3;
    double min_gap = INFINITY;
    for (const double a : kAlphaGrid) {
        const LoadFactor load(a);
        const double gap = an::variance_upper_bound(load, ModelKind::InsertOnly) -
                           an::variance_search_cost(load, ModelKind::InsertOnly).variance;
        min_gap = std::min(min_gap, gap);
    }
    ok = ok && min_gap >= 0.0;
    return {ok, "bound(beta=1e6) " + fmt("%.6f", b) + "; min bound - variance over grid " + fmt("%.4g", min_gap)};
}

Outcome c4() {
    const std::array<double, 4> betas{2, 10, 50, 100};
    const std::array<double, 4> want{0.7641, 7.6774, 46.2624, 95.605};
    bool ok = true;
    std::string detail = "variances";
    for (std::size_t k = 0; k < betas.size(); ++k) {
        const LoadFactor load = LoadFactor::from_beta(betas[k]);
        const double v = an::variance_search_cost(load, ModelKind::SteadyState).variance;
        const double bound = an::variance_upper_bound(load, ModelKind::SteadyState);
        ok = ok && std::abs(v - want[k]) <= 1e-2 && bound == betas[k] + 1.0 / 3.0 && v <= bound;
        detail += " " + fmt("%.4f", v);
    }
    return {ok, detail + "; each <= beta + 1/3"};
}

Outcome c5() {
    double worst = -INFINITY;
    for (const ModelKind model : {ModelKind::InsertOnly, ModelKind::SteadyState}) {
        for (const double a : kAlphaGrid) {
            const LoadFactor load(a);
            const auto t = an::rh_tails(load, model);
            for (std::size_t i = 1; i <= t.size(); ++i) {
                worst = std::max(worst, t.double_tail(i) - an::ode_majorant(static_cast<double>(i), load, model));
            }
        }
    }
    const auto insert_only = an::comparison_lemma_check([](double x) { return std::expm1(-x); },
                                                        std::log(10.0), 50);
    const auto steady = an::comparison_lemma_check([](double x) { return -x / (1.0 + x); }, 9.0, 50);
    const bool ok = worst <= 1e-9 && insert_only.holds && steady.holds;
    return {ok, "max(q_i - Q(i)) " + fmt("%.3g", worst) + "; lemma check " +
                    (insert_only.holds ? "true" : "false") + "/" + (steady.holds ? "true" : "false")};
}

Outcome c6() {
    double worst = -INFINITY;
    for (const double a : {0.9, 0.99, 0.999}) {
        const LoadFactor load(a);
        const auto t = an::rh_tails(load, ModelKind::InsertOnly);
        for (std::size_t i = 1; i <= t.size(); ++i) {
            const double lhs = load.beta() / (load.beta() - 1.0) * t.single_tail(i);
            worst = std::max(worst, lhs - an::tail_upper_bound(static_cast<double>(i), load));
        }
    }
    return {worst <= 0.0, "max(lhs - bound) " + fmt("%.3g", worst)};
}

Outcome c7() {
    const auto r = sim::replicate(config(1000000, 0.99, Discipline::RH, ModelKind::InsertOnly, 0, 5));
    const double rel = std::abs(r.empirical_mean - 4.6517) / 4.6517;
    const double sup = r.tail_sup_diff.value_or(INFINITY);
    return {rel <= 0.01 && sup <= 0.01, "mean " + fmt("%.5f", r.empirical_mean) + " (rel err " +
                                            fmt("%.2e", rel) + "), tail sup " + fmt("%.2e", sup)};
}

Outcome c8() {
    const auto r = sim::replicate(config(100000, 0.9, Discipline::RH, ModelKind::SteadyState, 1000000, 5));
    const double mrel = std::abs(r.empirical_mean - 10.0) / 10.0;
    const double vrel = std::abs(r.empirical_var - 7.677) / 7.677;
    return {mrel <= 0.02 && vrel <= 0.10, "mean " + fmt("%.4f", r.empirical_mean) + " (rel err " +
                                              fmt("%.2e", mrel) + "), variance " + fmt("%.4f", r.empirical_var) +
                                              " (rel err " + fmt("%.2e", vrel) + ")"};
}

Outcome c9() {
    bool ok = true;
    std::string detail;
    for (const Discipline d : {Discipline::FCFS, Discipline::LCFS, Discipline::RH}) {
        const auto r = sim::replicate(config(100000, 0.9, d, ModelKind::InsertOnly, 0, 10));
        const double rel = std::abs(r.empirical_mean - 2.5584) / 2.5584;
        ok = ok && rel <= 0.02;
        detail += std::string(detail.empty() ? "" : ", ") + std::string(to_string(d)) + " " + fmt("%.4f", r.empirical_mean);
    }
    return {ok, detail};
}

Outcome c10() {
    const auto r = sim::replicate(config(100000, 0.9, Discipline::FCFS, ModelKind::SteadyState, 1000000, 1));
    const double rel = std::abs(r.empirical_var - 90.0) / 90.0;
    return {rel <= 0.15, "variance " + fmt("%.3f", r.empirical_var) + " (rel err " + fmt("%.2e", rel) + ")"};
}

Outcome c11() {
    const auto c = config(1000000, 0.999, Discipline::RH, ModelKind::InsertOnly, 0, 1);
    const Table table = sim::fill(c, c.base_seed);
    const auto moments = an::variance_search_cost(c.load, ModelKind::InsertOnly);
    const double sigma = std::sqrt(moments.variance);
    const auto r = sim::search_cost_experiment(table, 100000, moments.mean, c.base_seed);
    const bool ok = r.centered_mean <= 3.0 * sigma && r.standard_mean >= 6.5;
    return {ok, "centered " + fmt("%.4f", r.centered_mean) + " <= 3 sigma " + fmt("%.4f", 3.0 * sigma) +
                    "; standard " + fmt("%.4f", r.standard_mean)};
}

Outcome c12() {
    const std::uint64_t m = 100000;
    const auto c = config(m, 0.9, Discipline::RH, ModelKind::SteadyState, 0, 1);
    const std::array<std::uint64_t, 3> checkpoints{2 * m, 4 * m, 8 * m};
    const auto snaps = sim::steady_state_snapshots(c, c.base_seed, checkpoints);
    // Per age: |difference of tail proportions| against three standard
    // errors of a two-sample binomial difference (pooled proportion).
    double worst_z = 0.0;
    std::string detail;
    for (std::size_t a = 0; a < snaps.size(); ++a) {
        for (std::size_t b = a + 1; b < snaps.size(); ++b) {
            const auto ta = snaps[a].tail_probabilities();
            const auto tb = snaps[b].tail_probabilities();
            const double na = static_cast<double>(snaps[a].n);
            const double nb = static_cast<double>(snaps[b].n);
            double pair_z = 0.0;
            for (std::size_t i = 0; i < std::max(ta.size(), tb.size()); ++i) {
                const double pa = i < ta.size() ? ta[i] : 0.0;
                const double pb = i < tb.size() ? tb[i] : 0.0;
                const double p = (pa * na + pb * nb) / (na + nb);
                const double se = std::sqrt(p * (1.0 - p) * (1.0 / na + 1.0 / nb));
                if (se > 0.0) pair_z = std::max(pair_z, std::abs(pa - pb) / se);
            }
            worst_z = std::max(worst_z, pair_z);
            detail += (detail.empty() ? "" : "; ") + std::to_string(checkpoints[a] / m) + "m vs " +
                      std::to_string(checkpoints[b] / m) + "m sup " +
                      fmt("%.4f", sim::tail_sup_diff(snaps[a], snaps[b])) + " z " + fmt("%.1f", pair_z);
        }
    }
    return {worst_z <= 3.0, detail};
}

Outcome c13() {
    double worst = 0.0;
    worst = std::max(worst, std::abs(numeric::lambert_w(0.0)));
    for (double e = -300.0; e <= 300.0; e += 0.25) {
        const double y = std::pow(10.0, e);
        const double w = numeric::lambert_w(y);
        // w * e^w overflows near y = 1e300; compare in the log domain there.
        const double resid = y > 1e250 ? std::abs(std::log(w) + w - std::log(y)) * y
                                       : std::abs(w * std::exp(w) - y);
        worst = std::max(worst, resid / std::max(1.0, y));
    }
    const auto q = numeric::adaptive_simpson(an::logistic_limit_density, -40.0, 40.0, 1e-12);
    const double err = std::abs(q.value - 1.0);
    return {worst <= 1e-12 && err <= 1e-9,
            "max scaled Lambert residual " + fmt("%.2e", worst) + "; logistic integral error " + fmt("%.2e", err)};
}

}  // namespace

int main() {
    criterion(1, "double tails at alpha=0.9", 1e-3, c1);
    criterion(2, "insert-only variance near alpha=1", 10e-3, c2);
    criterion(3, "insert-only variance bound", 100e-3, c3);
    criterion(4, "steady-state variance and bound", 10e-3, c4);
    criterion(5, "majorant domination and comparison lemma", 1.0, c5);
    criterion(6, "tail bound", 10e-3, c6);
    criterion(7, "simulation vs recurrence, insert-only", 30.0, c7);
    criterion(8, "simulation vs recurrence, steady state", 60.0, c8);
    criterion(9, "discipline-independent mean", 0.0, c9);
    criterion(10, "FCFS variance under churn", 0.0, c10);
    criterion(11, "mean-centered search", 30.0, c11);
    criterion(12, "stationarity of the age distribution", 0.0, c12);
    criterion(13, "numeric kernels", 0.0, c13);
    std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
