#include "rhlab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rhlab/errors.hpp"
#include "rhlab/numeric.hpp"

namespace rhlab {

std::string_view to_string(ModelKind model) noexcept {
    return model == ModelKind::InsertOnly ? "insert-only" : "steady-state";
}

ModelKind parse_model(std::string_view text) {
    if (text == "insert-only") return ModelKind::InsertOnly;
    if (text == "steady-state") return ModelKind::SteadyState;
    throw ValidationError("unknown model '" + std::string(text) + "'");
}

}  // namespace rhlab

namespace rhlab::analytic {

namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr std::size_t kMaxTerms = 1u << 20;

// Euler-Maclaurin constants for m = 2.
constexpr double kB1 = -0.5;
constexpr double kB2 = 1.0 / 6.0;

void require_positive_load(LoadFactor load, const char* what) {
    if (!(load.alpha() > 0.0)) {
        throw ValidationError(std::string(what) + " requires 0 < alpha < 1");
    }
}

// Decrement d_{i+1} - d_i; magnitude at most 1.
double tail_step(double d, ModelKind model) noexcept {
    if (model == ModelKind::InsertOnly) {
        return std::expm1(-d);
    }
    return -d / (1.0 + d);
}

}  // namespace

TailSequence rh_tails(LoadFactor load, ModelKind model, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ValidationError("rh_tails: epsilon must lie in (0, 1)");
    }
    TailSequence tails{load, model, {}, {}, epsilon, 2.0 * epsilon};
    if (load.alpha() == 0.0) {
        tails.remainder_bound = 0.0;
        return tails;
    }
    // The steady-state sequence starts near beta and loses about 1 per step,
    // so it is carried as an unevaluated sum hi + lo (Knuth's TwoSum) to keep
    // rounding from accumulating over ~beta steps.
    double hi = model == ModelKind::InsertOnly ? -std::log1p(-load.alpha()) : load.beta() - 1.0;
    double lo = 0.0;
    while (tails.values.size() < kMaxTerms) {
        const double d = hi + lo;
        tails.values.push_back(d);
        if (d < epsilon) {
            tails.singles.push_back(d);
            return tails;
        }
        const double decrement = tail_step(d, model);
        tails.singles.push_back(-decrement);
        const double step = decrement + lo;
        const double sum = hi + step;
        const double bp = sum - hi;
        lo = (hi - (sum - bp)) + (step - bp);
        hi = sum;
    }
    throw NumericError("rh_tails: recurrence did not fall below epsilon");
}

double mean_search_cost(LoadFactor load, ModelKind model) {
    const double a = load.alpha();
    if (model == ModelKind::SteadyState) {
        return load.beta();
    }
    if (a < 1e-4) {
        // (1/a) ln(1/(1-a)) = 1 + a/2 + a^2/3 + a^3/4 + ...
        return 1.0 + a * (0.5 + a * (1.0 / 3.0 + a * (0.25 + a / 5.0)));
    }
    return -std::log1p(-a) / a;
}

std::vector<double> distribution(const TailSequence& tails) {
    if (tails.alpha() == 0.0 || tails.values.empty()) {
        return {1.0};
    }
    std::vector<double> p(tails.size());
    for (std::size_t i = 1; i <= tails.size(); ++i) {
        // (d_i - 2 d_{i+1} + d_{i+2}) / alpha, formed from the single tails.
        const double second_diff = tails.single_tail(i) - tails.single_tail(i + 1);
        p[i - 1] = std::max(0.0, second_diff / tails.alpha());
    }
    return p;
}

std::vector<double> tail_probabilities(const TailSequence& tails) {
    if (tails.alpha() == 0.0 || tails.values.empty()) {
        return {1.0};
    }
    std::vector<double> tail(tails.size());
    for (std::size_t i = 1; i <= tails.size(); ++i) {
        tail[i - 1] = tails.single_tail(i) / tails.alpha();
    }
    return tail;
}

Moments variance_search_cost(LoadFactor load, ModelKind model, double epsilon) {
    if (load.alpha() == 0.0) {
        return {1.0, 0.0, 0.0};
    }
    const TailSequence tails = rh_tails(load, model, epsilon);
    double sum = 0.0;
    // Smallest terms first.
    for (auto it = tails.values.rbegin(); it != tails.values.rend(); ++it) {
        sum += *it;
    }
    const double mu = mean_search_cost(load, model);
    const double two_over_alpha = 2.0 / load.alpha();
    Moments out;
    out.mean = mu;
    out.variance = std::max(0.0, two_over_alpha * sum - mu - mu * mu);
    out.truncation_error = two_over_alpha * tails.remainder_bound;
    return out;
}

double ode_majorant(double x, LoadFactor load, ModelKind model) {
    if (!(x >= 1.0)) {
        throw ValidationError("ode_majorant requires x >= 1");
    }
    require_positive_load(load, "ode_majorant");
    const double beta = load.beta();
    if (model == ModelKind::InsertOnly) {
        // ln(beta - 1 + e^(x-1)) - x + 1, rearranged so e^(x-1) is never formed.
        return std::log1p((beta - 1.0) * std::exp(1.0 - x));
    }
    // W((beta-1) e^(beta-x)) through its logarithm.
    return numeric::solve_w_log(std::log(beta - 1.0) + beta - x);
}

double euler_maclaurin_sum_bound(double integral, double q_at_1, double dq_at_1) {
    // sum Q(i) = I + B1 (Q(inf) - Q(1)) + B2/2! (Q'(inf) - Q'(1)) + R2, with
    // |R2| bounded by the B2 term itself because Q'' >= 0.
    const double first = kB1 * (0.0 - q_at_1);
    const double second = kB2 / 2.0 * (0.0 - dq_at_1);
    return integral + first + second + std::abs(second);
}

double majorant_integral(LoadFactor load, ModelKind model) {
    require_positive_load(load, "majorant_integral");
    const double beta = load.beta();
    if (model == ModelKind::SteadyState) {
        // dx = -(1 + Q)/Q dQ, so the integral is that of (1 + u) over [0, beta - 1].
        const double top = beta - 1.0;
        return top + 0.5 * top * top;
    }
    // dx = dQ / (e^-Q - 1): integrate u / (1 - e^-u) over [0, ln beta].
    const auto integrand = [](double u) { return u == 0.0 ? 1.0 : u / -std::expm1(-u); };
    return numeric::adaptive_simpson(integrand, 0.0, std::log(beta), kQuadratureTolerance).value;
}

double variance_upper_bound(LoadFactor load, ModelKind model) {
    require_positive_load(load, "variance_upper_bound");
    if (model == ModelKind::SteadyState) {
        return load.beta() + 1.0 / 3.0;
    }
    const double a = load.alpha();
    const double mu = mean_search_cost(load, model);
    const double sum_bound = euler_maclaurin_sum_bound(majorant_integral(load, model), a * mu, -a);
    return 2.0 / a * sum_bound - mu - mu * mu;
}

double tail_upper_bound(double i, LoadFactor load) {
    if (!(i >= 1.0)) {
        throw ValidationError("tail_upper_bound requires i >= 1");
    }
    require_positive_load(load, "tail_upper_bound");
    const double beta = load.beta();
    // beta / (beta - 1 + e^(i-1)) with the large exponent moved to the numerator.
    const double decay = std::exp(1.0 - i);
    return beta * decay / ((beta - 1.0) * decay + 1.0);
}

double logistic_limit_density(double x) noexcept {
    const double e = std::exp(-std::abs(x));
    const double denom = 1.0 + e;
    return e / (denom * denom);
}

ComparisonResult comparison_lemma_check(const std::function<double(double)>& f, double a1,
                                        std::size_t n) {
    if (!(a1 > 0.0)) {
        throw ValidationError("comparison_lemma_check requires a1 > 0");
    }
    if (n < 1) {
        throw ValidationError("comparison_lemma_check requires n >= 1");
    }
    constexpr int kStepsPerUnit = 1024;
    constexpr double h = 1.0 / kStepsPerUnit;
    constexpr double kSlack = 1e-9;

    ComparisonResult result;
    result.sequence.reserve(n);
    result.ode.reserve(n);

    double a = a1;
    double A = a1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (!(a >= 0.0 && a <= a1)) {
            throw ModelViolationError("comparison_lemma_check: a_" + std::to_string(i) +
                                      " left [0, a1]; f is not admissible");
        }
        result.sequence.push_back(a);
        result.ode.push_back(A);
        if (A < a - kSlack && result.holds) {
            result.holds = false;
            result.witness = i;
        }
        if (i == n) {
            break;
        }
        a += f(a);
        for (int s = 0; s < kStepsPerUnit; ++s) {
            const double k1 = f(A);
            const double k2 = f(A + 0.5 * h * k1);
            const double k3 = f(A + 0.5 * h * k2);
            const double k4 = f(A + h * k3);
            A += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    return result;
}

}  // namespace rhlab::analytic
