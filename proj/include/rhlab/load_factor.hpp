#pragma once

#include <limits>
#include <string>
#include <string_view>

#include "rhlab/errors.hpp"

namespace rhlab {

/// Load factor alpha = n/m together with beta = 1/(1 - alpha).
class LoadFactor {
public:
    constexpr LoadFactor() = default;

    explicit LoadFactor(double alpha) : alpha_(alpha), beta_(1.0 / (1.0 - alpha)) {
        if (!(alpha >= 0.0 && alpha < 1.0)) {
            throw ValidationError("load factor must satisfy 0 <= alpha < 1, got " +
                                  std::to_string(alpha));
        }
    }

    /// Builds the load factor with beta = b (b >= 1).
    static LoadFactor from_beta(double beta) {
        if (!(beta >= 1.0) || beta == std::numeric_limits<double>::infinity()) {
            throw ValidationError("beta must be finite and >= 1, got " + std::to_string(beta));
        }
        LoadFactor lf(1.0 - 1.0 / beta);
        lf.beta_ = beta;
        return lf;
    }

    constexpr double alpha() const noexcept { return alpha_; }
    constexpr double beta() const noexcept { return beta_; }

private:
    double alpha_ = 0.0;
    double beta_ = 1.0;
};

/// Insert-only growth versus insert/delete churn at fixed load.
enum class ModelKind { InsertOnly, SteadyState };

std::string_view to_string(ModelKind model) noexcept;
ModelKind parse_model(std::string_view text);

}  // namespace rhlab
