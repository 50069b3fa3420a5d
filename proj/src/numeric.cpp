#include "rhlab/numeric.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rhlab/errors.hpp"

namespace rhlab::numeric {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kRelStep = 4.0 * std::numeric_limits<double>::epsilon();

struct SimpsonState {
    const std::function<double(double)>& f;
    int evaluations = 0;
    double error = 0.0;
    bool converged = true;

    double eval(double x) {
        ++evaluations;
        return f(x);
    }

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double h = b - a;
        const double left = h / 12.0 * (fa + 4.0 * flm + fm);
        const double right = h / 12.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        if (std::abs(delta) <= 15.0 * tol) {
            error += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        if (depth <= 0 || m <= a || m >= b) {
            converged = false;
            error += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
};

}  // namespace

double lambert_w(double y) {
    if (!(y >= 0.0)) {
        throw ValidationError("lambert_w requires y >= 0");
    }
    if (y == 0.0) {
        return 0.0;
    }
    if (std::isinf(y)) {
        return y;
    }
    double w = std::log1p(y);
    for (int it = 0; it < kMaxIterations; ++it) {
        // Halley on g(w) = w e^w - y, written with e^-w to stay finite near y = DBL_MAX.
        const double ew = std::exp(-w);
        const double g = w - y * ew;  // g(w) e^-w
        const double wp1 = w + 1.0;
        const double step = g / (wp1 - (w + 2.0) * g / (2.0 * wp1));
        w -= step;
        if (std::abs(step) <= kRelStep * std::max(1.0, std::abs(w))) {
            return w;
        }
    }
    throw NumericError("lambert_w: no convergence for y = " + std::to_string(y));
}

double solve_w_log(double log_y) {
    if (std::isnan(log_y)) {
        throw ValidationError("solve_w_log: argument is NaN");
    }
    if (log_y == std::numeric_limits<double>::infinity()) {
        return log_y;
    }
    if (log_y >= 1.0) {
        // g(w) = w + ln w - L is increasing and concave; from w0 = L the first
        // step lands left of the root and the rest converge monotonically.
        double w = log_y;
        for (int it = 0; it < kMaxIterations; ++it) {
            const double step = (w + std::log(w) - log_y) / (1.0 + 1.0 / w);
            w -= step;
            if (std::abs(step) <= kRelStep * w) {
                return w;
            }
        }
    } else {
        // In v = ln w: h(v) = e^v + v - L, increasing and convex.
        double v = log_y - 1.0;
        for (int it = 0; it < kMaxIterations; ++it) {
            const double ev = std::exp(v);
            const double step = (ev + v - log_y) / (ev + 1.0);
            v -= step;
            if (std::abs(step) <= kRelStep * std::max(1.0, std::abs(v))) {
                return std::exp(v);
            }
        }
    }
    throw NumericError("solve_w_log: no convergence for L = " + std::to_string(log_y));
}

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth) {
    if (!(abs_tol > 0.0)) {
        throw ValidationError("adaptive_simpson: tolerance must be positive");
    }
    if (a == b) {
        return {};
    }
    SimpsonState state{f};
    const double fa = state.eval(a);
    const double fb = state.eval(b);
    const double fm = state.eval(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double value = state.recurse(a, b, fa, fm, fb, whole, abs_tol, max_depth);
    if (!state.converged || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "adaptive_simpson: tolerance " << abs_tol << " not met, achieved ~" << state.error;
        throw NumericError(msg.str());
    }
    return {value, state.error, state.evaluations};
}

}  // namespace rhlab::numeric
