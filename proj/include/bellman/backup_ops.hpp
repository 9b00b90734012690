#pragma once

#include <span>

#include "bellman/mdp.hpp"

namespace bellman {

enum class OperatorKind { Max, Mean, Softmax, Mellowmax };

/// Which aggregator the backup uses over next-state action values.
/// parameter is tau for Softmax (>= 0) and omega for Mellowmax (> 0).
struct OperatorSpec {
    OperatorKind kind = OperatorKind::Max;
    double parameter = 0.0;

    static OperatorSpec max() { return {OperatorKind::Max, 0.0}; }
    static OperatorSpec mean() { return {OperatorKind::Mean, 0.0}; }
    static OperatorSpec softmax(double tau);
    static OperatorSpec mellowmax(double omega);

    std::string name() const;
};

using QRow = std::span<const double>;

double max_value(QRow row);
double mean_value(QRow row);

/// exp(tau*(x_i - max x)) / sum, overflow-safe for any finite row and tau up
/// to 1e6; tau = 0 is the exact uniform distribution.
std::vector<double> softmax_weights(QRow row, double tau);

/// Softmax-weighted row value g_row(tau). Evaluated as
/// max - sum_i w_i (max - x_i), which keeps the result in [mean, max]
/// regardless of rounding.
double softmax_value(QRow row, double tau);

/// log((1/m) sum exp(omega x_i)) / omega via shifted log-sum-exp.
double mellowmax_value(QRow row, double omega);

double operator_value(const OperatorSpec& op, QRow row);

/// max(row) - softmax_value(row, tau); nonnegative by construction.
double gap(QRow row, double tau);

/// Per-row spread max(row) - min(row). The Definition-1 supremum over
/// visited Q tables is maintained by the iteration trace, not here.
double delta_hat(QRow row);

/// One Bellman backup: Q'(s,a) = R(s,a) + gamma * sum_s' P(s'|s,a) V_op(Q(s',.)).
QTable backup(const TabularMDP& mdp, const OperatorSpec& op, const QTable& q);

}  // namespace bellman
