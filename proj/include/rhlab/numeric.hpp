#pragma once

#include <functional>

namespace rhlab::numeric {

/// Principal branch of Lambert's W for y >= 0, i.e. the w >= 0 with w*e^w = y.
///
/// Halley iteration started from w0 = ln(1 + y); at most 100 steps.
/// Throws ValidationError for y < 0 or NaN and NumericError if the
/// iteration cap is hit.
double lambert_w(double y);

/// Solves w + ln(w) = log_y for w > 0, i.e. W(exp(log_y)) without forming
/// exp(log_y). Works for any finite log_y; returns 0 once the answer
/// underflows.
///
/// Newton iteration: for log_y >= 1 on w from w0 = log_y, otherwise on
/// v = ln(w) from v0 = log_y - 1 (w0 = e^(log_y - 1)).
double solve_w_log(double log_y);

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance.
///
/// Uses the Richardson-corrected panel value and a per-level depth cap;
/// throws NumericError carrying the achieved error estimate when the
/// tolerance cannot be met inside max_depth bisections.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth = 50);

}  // namespace rhlab::numeric
