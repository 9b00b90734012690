#pragma once

#include <span>

namespace bellman {

/// Range of Q-values reachable by soft Q-iteration started inside
/// [r_min, r_max]: [r_min/(1-gamma), r_max/(1-gamma)].
struct ValueBounds {
    double q_min = 0.0;
    double q_max = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double gamma = 0.0;
};

ValueBounds q_value_bounds(double r_min, double r_max, double gamma);

/// 2 r_max / (1 - gamma): bound on |Q(s,a_i) - Q(s,a_j)| under the
/// r_max >= -r_min >= 0 normalization.
double pairwise_gap_bound(double r_max, double gamma);

/// delta_hat / (m exp(tau delta_hat)); requires delta_hat > 0.
double gap_lower_bound(double delta_hat, int m, double tau);

/// (m-1) max{ 1/(tau+2), 2 q_max / (1 + exp(tau)) }.
double gap_upper_bound(int m, double tau, double q_max);

/// q_star_value - gamma (m-1)/(1-gamma) max{1/(tau+2), 2 q_max/(1+exp(tau))}.
double performance_lower_bound(double q_star_value, double gamma, int m,
                               double tau, double q_max);

/// sum_{j=1..k} gamma^j zeta = zeta gamma (1 - gamma^k) / (1 - gamma).
double zeta_accumulation_bound(int k, double gamma, double zeta);

/// gamma (1-gamma^k)/(1-gamma) * exp(-tau delta_min_pos) * sum of positive
/// deltas, where delta_min_pos is the smallest strictly positive entry.
/// Returns 0 when every delta is 0.
double exponential_rate_bound(int k, double gamma, double tau,
                              std::span<const double> deltas);

}  // namespace bellman
