#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mlsd {

/// gamma_k = 1 - k^k / (e^k k!), evaluated in log space.
inline double gamma_k(std::size_t k) {
    if (k == 0) throw std::invalid_argument("gamma_k needs k >= 1");
    const double kd = static_cast<double>(k);
    return 1.0 - std::exp(kd * std::log(kd) - kd - std::lgamma(kd + 1.0));
}

/// Stirling form 1 - 1/sqrt(2 pi k).
inline double gamma_k_stirling(std::size_t k) {
    if (k == 0) throw std::invalid_argument("gamma_k needs k >= 1");
    return 1.0 - 1.0 / std::sqrt(2.0 * std::numbers::pi * static_cast<double>(k));
}

}  // namespace mlsd
