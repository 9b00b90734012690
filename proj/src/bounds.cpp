#include "bellman/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bellman {

ValueBounds q_value_bounds(double r_min, double r_max, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("q_value_bounds: gamma not in (0,1)");
    if (r_min > r_max)
        throw std::invalid_argument("q_value_bounds: r_min > r_max");
    return {r_min / (1.0 - gamma), r_max / (1.0 - gamma), r_min, r_max, gamma};
}

double pairwise_gap_bound(double r_max, double gamma) {
    if (r_max < 0.0)
        throw std::invalid_argument("pairwise_gap_bound: r_max must be >= 0");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("pairwise_gap_bound: gamma not in (0,1)");
    return 2.0 * r_max / (1.0 - gamma);
}

double gap_lower_bound(double delta_hat, int m, double tau) {
    if (delta_hat <= 0.0)
        throw std::invalid_argument("gap_lower_bound: requires delta_hat > 0");
    if (m < 2) throw std::invalid_argument("gap_lower_bound: m must be >= 2");
    if (tau < 0.0) throw std::invalid_argument("gap_lower_bound: tau must be >= 0");
    return delta_hat / (static_cast<double>(m) * std::exp(tau * delta_hat));
}

double gap_upper_bound(int m, double tau, double q_max) {
    if (m < 2) throw std::invalid_argument("gap_upper_bound: m must be >= 2");
    if (tau < 0.0) throw std::invalid_argument("gap_upper_bound: tau must be >= 0");
    if (q_max < 0.0) throw std::invalid_argument("gap_upper_bound: q_max must be >= 0");
    // exp(tau) overflows to inf for large tau; the branch then contributes 0
    const double harmonic = 1.0 / (tau + 2.0);
    const double exponential = 2.0 * q_max / (1.0 + std::exp(tau));
    return static_cast<double>(m - 1) * std::max(harmonic, exponential);
}

double performance_lower_bound(double q_star_value, double gamma, int m,
                               double tau, double q_max) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("performance_lower_bound: gamma not in (0,1)");
    return q_star_value -
           gamma / (1.0 - gamma) * gap_upper_bound(m, tau, q_max);
}

double zeta_accumulation_bound(int k, double gamma, double zeta) {
    if (k < 0) throw std::invalid_argument("zeta_accumulation_bound: k must be >= 0");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("zeta_accumulation_bound: gamma not in (0,1)");
    if (zeta < 0.0)
        throw std::invalid_argument("zeta_accumulation_bound: zeta must be >= 0");
    return zeta * gamma * (1.0 - std::pow(gamma, k)) / (1.0 - gamma);
}

double exponential_rate_bound(int k, double gamma, double tau,
                              std::span<const double> deltas) {
    if (k < 0) throw std::invalid_argument("exponential_rate_bound: k must be >= 0");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("exponential_rate_bound: gamma not in (0,1)");
    if (tau < 0.0)
        throw std::invalid_argument("exponential_rate_bound: tau must be >= 0");
    double min_pos = 0.0;
    double sum_pos = 0.0;
    for (double d : deltas) {
        if (d < 0.0)
            throw std::invalid_argument("exponential_rate_bound: negative delta");
        if (d > 0.0) {
            sum_pos += d;
            if (min_pos == 0.0 || d < min_pos) min_pos = d;
        }
    }
    if (sum_pos == 0.0) return 0.0;
    return gamma * (1.0 - std::pow(gamma, k)) / (1.0 - gamma) *
           std::exp(-tau * min_pos) * sum_pos;
}

}  // namespace bellman
