#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bellman {

enum class NoiseKind { StandardNormal, Uniform };

/// Additive estimation-noise model: Q_t(s,a) = baseline + eps_a, with eps
/// standard normal or uniform on [-half_width, half_width].
struct NoiseSpec {
    NoiseKind distribution = NoiseKind::StandardNormal;
    double half_width = 1.0;  // Uniform only
    int m = 2;
    int n_trials = 100;
    std::uint64_t seed = 0;
    double baseline = 0.0;  // V*(s)
};

struct TrialMatrix {
    int n_trials = 0;
    int m = 0;
    std::vector<double> values;  // [trial][action]

    std::span<const double> row(int t) const {
        return {values.data() + static_cast<std::size_t>(t) * m,
                static_cast<std::size_t>(m)};
    }
};

TrialMatrix sample_errors(const NoiseSpec& spec);

// Per-trial estimator errors relative to the (cancelling) baseline.
std::vector<double> overestimation_max(const TrialMatrix& trials);
std::vector<double> overestimation_softmax(const TrialMatrix& trials, double tau);
std::vector<double> overestimation_mellowmax(const TrialMatrix& trials, double omega);
// evaluate b at a's argmax (selection/evaluation split)
std::vector<double> overestimation_double_max(const TrialMatrix& trials_a,
                                              const TrialMatrix& trials_b);
// selection weights from a, values from b
std::vector<double> overestimation_double_softmax(const TrialMatrix& trials_a,
                                                  const TrialMatrix& trials_b,
                                                  double tau);

struct OverestimationReport {
    int checked = 0;           // trials with per-row spread > 0
    int skipped = 0;           // degenerate spread-0 trials
    int lower_violations = 0;  // reduction < lower bound - slack
    int upper_violations = 0;  // reduction > upper bound + slack
    std::vector<double> reductions;
    double mean_reduction = 0.0;
};

/// Per trial with spread > 0, checks
///   gap_lower_bound(dh, m, tau) <= max err - softmax err <= gap_upper_bound
/// with q_max taken per trial as max |eps| when q_range <= 0, else q_range.
OverestimationReport reduction_bounds_check(const TrialMatrix& trials,
                                            double tau, double q_range = 0.0);

struct MonotonicityReport {
    int violations = 0;
    int witness_trial = -1;
    double witness_tau = 0.0;
    std::vector<double> mean_curve;  // mean softmax error per grid point
};

/// Per trial, softmax error must be nondecreasing across the tau grid
/// (slack 1e-12).
MonotonicityReport monotonicity_sweep(const TrialMatrix& trials,
                                      std::span<const double> tau_grid);

struct SweepPoint {
    int m = 0;
    double param = 0.0;
    double softmax_approx_mean = 0.0, softmax_approx_sd = 0.0;
    double mellowmax_approx_mean = 0.0, mellowmax_approx_sd = 0.0;
    double softmax_over_mean = 0.0, softmax_over_sd = 0.0;
    double mellowmax_over_mean = 0.0, mellowmax_over_sd = 0.0;
};

/// Approximation error to max and overestimation error for softmax and
/// mellowmax on a shared parameter grid, per action count.
std::vector<SweepPoint> figure7_sweep(std::span<const int> m_values,
                                      std::span<const double> param_grid,
                                      const NoiseSpec& spec);

// order-independent aggregation helpers (compensated summation)
double kahan_sum(std::span<const double> xs);
double mean_of(std::span<const double> xs);
double sd_of(std::span<const double> xs);

}  // namespace bellman
