#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "rhlab/load_factor.hpp"

namespace rhlab::analytic {

/// Truncated double tails of the Robin Hood search-cost distribution.
///
/// `values[i - 1]` holds the double tail at index i (i >= 1), scaled by
/// alpha: the first entry is alpha times the mean search cost. Iteration
/// stops at the first value below `epsilon`; the discarded remainder is
/// bounded by `remainder_bound`.
struct TailSequence {
    LoadFactor load;
    ModelKind model = ModelKind::InsertOnly;
    std::vector<double> values;
    /// Single tails d_i - d_{i+1} taken from the recurrence increments, so they
    /// keep full relative precision even when the double tails are large. The
    /// last entry equals the last double tail (tail past K treated as 0).
    std::vector<double> singles;
    double epsilon = 0.0;
    double remainder_bound = 0.0;

    double alpha() const noexcept { return load.alpha(); }
    std::size_t size() const noexcept { return values.size(); }

    /// Double tail at 1-based index i; zero past the truncation point.
    double double_tail(std::size_t i) const noexcept {
        return (i >= 1 && i <= values.size()) ? values[i - 1] : 0.0;
    }

    /// Single tail alpha * Pr{X >= i}, i.e. double_tail(i) - double_tail(i + 1).
    double single_tail(std::size_t i) const noexcept {
        return (i >= 1 && i <= singles.size()) ? singles[i - 1] : 0.0;
    }
};

struct Moments {
    double mean = 1.0;
    double variance = 0.0;
    double truncation_error = 0.0;
};

/// Iterates the double-tail recurrence of the chosen model until the value
/// drops below epsilon.
///
///   InsertOnly:  d_1 = ln(beta),  d_{i+1} = d_i - 1 + exp(-d_i)
///   SteadyState: d_1 = beta - 1,  d_{i+1} = d_i^2 / (1 + d_i)
///
/// alpha == 0 yields an empty sequence.
TailSequence rh_tails(LoadFactor load, ModelKind model, double epsilon = 1e-12);

/// Expected successful search cost. Identical for FCFS, LCFS and RH.
double mean_search_cost(LoadFactor load, ModelKind model);

/// Point probabilities p_1..p_K; p_i = Pr{X = i}.
std::vector<double> distribution(const TailSequence& tails);

/// Tail probabilities Pr{X >= i} for i = 1..K.
std::vector<double> tail_probabilities(const TailSequence& tails);

/// Mean and variance from the double tails; the mean comes from the closed form.
Moments variance_search_cost(LoadFactor load, ModelKind model, double epsilon = 1e-12);

/// Solution Q(x) of Q' = f(Q) with Q(1) equal to the first double tail.
/// Upper bound on every double tail at integer x (comparison lemma).
double ode_majorant(double x, LoadFactor load, ModelKind model);

/// Euler-Maclaurin bound (m = 2) on sum_{i>=1} Q(i) for a convex decreasing
/// Q vanishing at infinity, given the integral over [1, inf), Q(1) and Q'(1).
double euler_maclaurin_sum_bound(double integral, double q_at_1, double dq_at_1);

/// Integral of the majorant over [1, inf).
///
/// InsertOnly substitutes u = Q and integrates u / (1 - e^-u) over
/// [0, ln beta] by adaptive Simpson at 1e-10; SteadyState is closed form.
double majorant_integral(LoadFactor load, ModelKind model);

/// Upper bound on the variance obtained by summing the majorant instead of
/// the double tails. SteadyState returns beta + 1/3 from the closed form.
double variance_upper_bound(LoadFactor load, ModelKind model);

/// Bound on Pr{X >= i} for the insert-only model: beta / (beta - 1 + e^(i-1)).
/// Accepts real i >= 1 so the bound can be evaluated between integers.
double tail_upper_bound(double i, LoadFactor load);

/// Standard logistic density e^-x / (1 + e^-x)^2.
double logistic_limit_density(double x) noexcept;

struct ComparisonResult {
    bool holds = true;
    /// First 1-based index where the ODE solution falls below the recurrence.
    std::optional<std::size_t> witness;
    std::vector<double> sequence;  ///< a_1..a_n
    std::vector<double> ode;       ///< A(1)..A(n)
};

/// Checks numerically that A(i) >= a_i for i <= n, where a_{i+1} = a_i + f(a_i)
/// and A' = f(A), both starting at a1. The ODE is integrated with classical
/// RK4 at step 1/1024.
///
/// f must be decreasing and nonpositive with f(0) = 0; a sequence leaving
/// [0, a1] throws ModelViolationError.
ComparisonResult comparison_lemma_check(const std::function<double(double)>& f, double a1,
                                        std::size_t n);

}  // namespace rhlab::analytic
