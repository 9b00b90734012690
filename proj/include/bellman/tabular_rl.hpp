#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bellman/backup_ops.hpp"
#include "bellman/mdp.hpp"

namespace bellman {

enum class TargetKind { Max, Mean, Softmax, Mellowmax, DoubleMax, DoubleSoftmax };

/// Bootstrap operator used in the TD target. The behavior policy is always
/// epsilon-greedy; the operator only shapes the target.
struct TargetOperator {
    TargetKind kind = TargetKind::Max;
    double parameter = 0.0;  // tau / omega where applicable

    static TargetOperator max() { return {TargetKind::Max, 0.0}; }
    static TargetOperator mean() { return {TargetKind::Mean, 0.0}; }
    static TargetOperator softmax(double tau) { return {TargetKind::Softmax, tau}; }
    static TargetOperator mellowmax(double omega) { return {TargetKind::Mellowmax, omega}; }
    static TargetOperator double_max() { return {TargetKind::DoubleMax, 0.0}; }
    static TargetOperator double_softmax(double tau) { return {TargetKind::DoubleSoftmax, tau}; }

    std::string name() const;
};

struct AgentConfig {
    TargetOperator target;
    double epsilon = 0.1;
    double alpha = 0.1;
    int episodes = 1000;
    int max_steps_per_episode = 100;
    std::uint64_t seed = 0;
    int start_state = 0;
    double q_init = 0.0;
    // evaluation cadence: eval_points checkpoints, eval_rollouts greedy
    // rollouts each, truncated at eval_horizon steps
    int eval_points = 20;
    int eval_rollouts = 100;
    int eval_horizon = 200;
};

struct CurvePoint {
    int episode = 0;
    double mean_return = 0.0;
    double q_start = 0.0;   // max_a Q(start, a)
    double bias_mean = 0.0; // mean over (s,a) of Q_est - Q*, NaN without Q*
    double bias_max = 0.0;
};

struct LearningCurve {
    std::vector<CurvePoint> points;
    // header: episode,mean_return,q_start,bias_mean,bias_max
    void write_csv(std::ostream& os) const;
};

struct QLearningResult {
    QTable q;        // main table (sum/2 of both tables for double variants)
    QTable q_a;      // first table
    QTable q_b;      // second table (double variants only, else empty)
    LearningCurve curve;
};

/// One-step TD control with the configured bootstrap target. Rewards are
/// sampled as R(s,a) + N(0, mdp.reward_noise_sd); episodes end on absorbing
/// states or the step cap. Deterministic given the config seed.
QLearningResult q_learning(const TabularMDP& mdp, const AgentConfig& config,
                           const QTable* q_star = nullptr);

/// Monte-Carlo discounted return of `policy` from start_state, using expected
/// rewards (reward noise is zero-mean and excluded from evaluation).
double evaluate_policy_return(const TabularMDP& mdp, const Policy& policy,
                              int n_episodes, int horizon, std::uint64_t seed,
                              int start_state = 0);

struct GapSummary {
    double mean = 0.0;
    double max = 0.0;
};

GapSummary overestimation_gap(const QTable& q_est, const QTable& q_star);

}  // namespace bellman
