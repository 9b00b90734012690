#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellman {

/// Finite MDP: |S| states, m actions, transition kernel P[s][a][s'],
/// expected rewards R[s][a], discount in (0,1). Immutable in practice:
/// construct, validate, then share read-only.
struct TabularMDP {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transition;  // [s][a][s'], row-major
    std::vector<double> reward;      // [s][a]
    double discount = 0.0;

    // environment metadata for the sampling layer; not part of the tuple
    // and not serialized
    double reward_noise_sd = 0.0;
    std::vector<std::uint8_t> absorbing;  // per-state terminal flags, may be empty

    double p(int s, int a, int s2) const {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double& p(int s, int a, int s2) {
        return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double r(int s, int a) const {
        return reward[static_cast<std::size_t>(s) * n_actions + a];
    }
    double& r(int s, int a) {
        return reward[static_cast<std::size_t>(s) * n_actions + a];
    }

    double r_min() const;
    double r_max() const;
    bool is_absorbing(int s) const {
        return !absorbing.empty() && absorbing[static_cast<std::size_t>(s)] != 0;
    }
};

struct QTable {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> values;  // [s][a]

    QTable() = default;
    QTable(int ns, int na, double fill = 0.0)
        : n_states(ns),
          n_actions(na),
          values(static_cast<std::size_t>(ns) * na, fill) {}

    double at(int s, int a) const {
        return values[static_cast<std::size_t>(s) * n_actions + a];
    }
    double& at(int s, int a) {
        return values[static_cast<std::size_t>(s) * n_actions + a];
    }
    const double* row(int s) const {
        return values.data() + static_cast<std::size_t>(s) * n_actions;
    }
    double* row(int s) {
        return values.data() + static_cast<std::size_t>(s) * n_actions;
    }

    double min_entry() const;
    double max_entry() const;
};

/// Per-state action distribution, rows sum to 1.
struct Policy {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> probs;  // [s][a]

    Policy() = default;
    Policy(int ns, int na, double fill = 0.0)
        : n_states(ns),
          n_actions(na),
          probs(static_cast<std::size_t>(ns) * na, fill) {}

    double at(int s, int a) const {
        return probs[static_cast<std::size_t>(s) * n_actions + a];
    }
    double& at(int s, int a) {
        return probs[static_cast<std::size_t>(s) * n_actions + a];
    }
};

struct ValidationResult {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

/// Reports every violated invariant (row sums, probability range, discount,
/// reward finiteness, dimensions); never throws.
ValidationResult validate_mdp(const TabularMDP& mdp);

/// Garnet-style generator: every (s,a) has exactly `branching` reachable
/// successors with Dirichlet(1,...,1) probabilities, rewards uniform in
/// [reward_lo, reward_hi]. Deterministic given seed.
TabularMDP random_mdp(int n_states, int n_actions, int branching,
                      double reward_lo, double reward_hi, std::uint64_t seed,
                      double discount = 0.9);

struct GridworldConfig {
    int width = 5;
    int height = 5;
    double noise = 0.0;  // slip probability, split over perpendicular moves
    double step_reward = 0.0;
    double goal_reward = 1.0;
    std::vector<int> goal_cells;
    double reward_noise_sd = 0.0;
    double discount = 0.9;
};

// action indices for the 4-action gridworld
enum GridAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

/// 4-action grid, row-major cell indexing (s = y*width + x). Intended move
/// with prob 1-noise, perpendicular slips with noise/2 each; off-grid moves
/// stay in place; goal cells are absorbing with zero reward. The expected
/// reward folds the goal bonus in: R(s,a) = step + goal_reward * P(enter goal).
TabularMDP gridworld(const GridworldConfig& cfg);

/// Point mass on the argmax action, ties broken toward the lowest index.
Policy greedy_policy(const QTable& q);

/// Per-state softmax weights with inverse temperature tau (tau = 0 -> uniform).
Policy softmax_policy(const QTable& q, double tau);

struct PolicyEvalResult {
    QTable q;
    int iterations = 0;
};

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(std::string msg, QTable last_iterate)
        : std::runtime_error(std::move(msg)), last(std::move(last_iterate)) {}
    QTable last;
};

/// Fixed point of the on-policy backup within sup-norm tol; throws
/// NonConvergenceError (carrying the last iterate) past max_iters.
PolicyEvalResult policy_evaluation(const TabularMDP& mdp, const Policy& policy,
                                   double tol = 1e-10, int max_iters = 10000);

// serialization: JSON document with fields n_states, n_actions, gamma,
// rewards (row-major), transitions (list of [s, a, s', p], omitted = 0)
std::string mdp_to_text(const TabularMDP& mdp);
TabularMDP mdp_from_text(const std::string& text);

}  // namespace bellman
