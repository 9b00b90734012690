#include "bellman/overestimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bellman/backup_ops.hpp"
#include "bellman/bounds.hpp"
#include "bellman/rng.hpp"

namespace bellman {

double kahan_sum(std::span<const double> xs) {
    double sum = 0.0, c = 0.0;
    for (double x : xs) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double mean_of(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return kahan_sum(xs) / static_cast<double>(xs.size());
}

double sd_of(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double mu = mean_of(xs);
    double acc = 0.0, c = 0.0;
    for (double x : xs) {
        const double d = (x - mu) * (x - mu) - c;
        const double t = acc + d;
        c = (t - acc) - d;
        acc = t;
    }
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

TrialMatrix sample_errors(const NoiseSpec& spec) {
    if (spec.m < 1) throw std::invalid_argument("sample_errors: m must be >= 1");
    if (spec.n_trials < 1)
        throw std::invalid_argument("sample_errors: n_trials must be >= 1");
    if (spec.distribution == NoiseKind::Uniform && spec.half_width <= 0.0)
        throw std::invalid_argument("sample_errors: uniform half_width must be > 0");

    TrialMatrix out;
    out.n_trials = spec.n_trials;
    out.m = spec.m;
    out.values.resize(static_cast<std::size_t>(spec.n_trials) * spec.m);
    SplitMix64 rng(spec.seed);
    for (auto& v : out.values)
        v = spec.distribution == NoiseKind::StandardNormal
                ? rng.normal()
                : rng.uniform(-spec.half_width, spec.half_width);
    return out;
}

std::vector<double> overestimation_max(const TrialMatrix& trials) {
    std::vector<double> errs(trials.n_trials);
    for (int t = 0; t < trials.n_trials; ++t) errs[t] = max_value(trials.row(t));
    return errs;
}

std::vector<double> overestimation_softmax(const TrialMatrix& trials, double tau) {
    std::vector<double> errs(trials.n_trials);
    for (int t = 0; t < trials.n_trials; ++t)
        errs[t] = softmax_value(trials.row(t), tau);
    return errs;
}

std::vector<double> overestimation_mellowmax(const TrialMatrix& trials,
                                             double omega) {
    std::vector<double> errs(trials.n_trials);
    for (int t = 0; t < trials.n_trials; ++t)
        errs[t] = mellowmax_value(trials.row(t), omega);
    return errs;
}

namespace {

void check_paired(const TrialMatrix& a, const TrialMatrix& b, const char* who) {
    if (a.n_trials != b.n_trials || a.m != b.m)
        throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

int argmax_lowest(std::span<const double> row) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(row.size()); ++i)
        if (row[i] > row[best]) best = i;
    return best;
}

}  // namespace

std::vector<double> overestimation_double_max(const TrialMatrix& trials_a,
                                              const TrialMatrix& trials_b) {
    check_paired(trials_a, trials_b, "overestimation_double_max");
    std::vector<double> errs(trials_a.n_trials);
    for (int t = 0; t < trials_a.n_trials; ++t)
        errs[t] = trials_b.row(t)[argmax_lowest(trials_a.row(t))];
    return errs;
}

std::vector<double> overestimation_double_softmax(const TrialMatrix& trials_a,
                                                  const TrialMatrix& trials_b,
                                                  double tau) {
    check_paired(trials_a, trials_b, "overestimation_double_softmax");
    std::vector<double> errs(trials_a.n_trials);
    for (int t = 0; t < trials_a.n_trials; ++t) {
        const auto w = softmax_weights(trials_a.row(t), tau);
        const auto vals = trials_b.row(t);
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * vals[i];
        errs[t] = acc;
    }
    return errs;
}

OverestimationReport reduction_bounds_check(const TrialMatrix& trials,
                                            double tau, double q_range) {
    OverestimationReport rep;
    rep.reductions.reserve(trials.n_trials);
    for (int t = 0; t < trials.n_trials; ++t) {
        const auto row = trials.row(t);
        const double dh = delta_hat(row);
        if (dh <= 0.0) {
            ++rep.skipped;
            continue;
        }
        ++rep.checked;
        const double reduction = gap(row, tau);
        rep.reductions.push_back(reduction);
        double q_max = q_range;
        if (q_max <= 0.0)
            for (double x : row) q_max = std::max(q_max, std::abs(x));
        const double lower = gap_lower_bound(dh, trials.m, tau);
        const double upper = gap_upper_bound(trials.m, tau, q_max);
        if (reduction < lower - 1e-12) ++rep.lower_violations;
        if (reduction > upper + 1e-12) ++rep.upper_violations;
    }
    rep.mean_reduction = mean_of(rep.reductions);
    return rep;
}

MonotonicityReport monotonicity_sweep(const TrialMatrix& trials,
                                      std::span<const double> tau_grid) {
    for (std::size_t i = 1; i < tau_grid.size(); ++i)
        if (tau_grid[i] < tau_grid[i - 1] || tau_grid[i] < 0.0)
            throw std::invalid_argument(
                "monotonicity_sweep: grid must be ascending and nonnegative");

    MonotonicityReport rep;
    std::vector<double> sums(tau_grid.size(), 0.0);
    std::vector<double> comps(tau_grid.size(), 0.0);
    for (int t = 0; t < trials.n_trials; ++t) {
        const auto row = trials.row(t);
        double prev = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tau_grid.size(); ++i) {
            const double v = softmax_value(row, tau_grid[i]);
            if (v < prev - 1e-12) {
                ++rep.violations;
                if (rep.witness_trial < 0) {
                    rep.witness_trial = t;
                    rep.witness_tau = tau_grid[i];
                }
            }
            prev = v;
            const double y = v - comps[i];
            const double acc = sums[i] + y;
            comps[i] = (acc - sums[i]) - y;
            sums[i] = acc;
        }
    }
    rep.mean_curve.resize(tau_grid.size());
    for (std::size_t i = 0; i < tau_grid.size(); ++i)
        rep.mean_curve[i] = sums[i] / static_cast<double>(trials.n_trials);
    return rep;
}

std::vector<SweepPoint> figure7_sweep(std::span<const int> m_values,
                                      std::span<const double> param_grid,
                                      const NoiseSpec& spec) {
    std::vector<SweepPoint> out;
    out.reserve(m_values.size() * param_grid.size());
    for (int m : m_values) {
        NoiseSpec cell = spec;
        cell.m = m;
        cell.seed = seed_split(spec.seed, "figure7/m=" + std::to_string(m));
        const TrialMatrix trials = sample_errors(cell);
        std::vector<double> sm_approx(trials.n_trials), mm_approx(trials.n_trials);
        std::vector<double> sm_over(trials.n_trials), mm_over(trials.n_trials);
        for (double param : param_grid) {
            for (int t = 0; t < trials.n_trials; ++t) {
                const auto row = trials.row(t);
                const double top = max_value(row);
                const double sm = softmax_value(row, param);
                const double mm = mellowmax_value(row, param);
                sm_approx[t] = top - sm;
                mm_approx[t] = top - mm;
                sm_over[t] = sm;
                mm_over[t] = mm;
            }
            SweepPoint pt;
            pt.m = m;
            pt.param = param;
            pt.softmax_approx_mean = mean_of(sm_approx);
            pt.softmax_approx_sd = sd_of(sm_approx);
            pt.mellowmax_approx_mean = mean_of(mm_approx);
            pt.mellowmax_approx_sd = sd_of(mm_approx);
            pt.softmax_over_mean = mean_of(sm_over);
            pt.softmax_over_sd = sd_of(sm_over);
            pt.mellowmax_over_mean = mean_of(mm_over);
            pt.mellowmax_over_sd = sd_of(mm_over);
            out.push_back(pt);
        }
    }
    return out;
}

}  // namespace bellman
