#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "bellman/backup_ops.hpp"
#include "bellman/mdp.hpp"

namespace bellman {

struct TraceRecord {
    int k = 0;
    double step_sup = 0.0;          // ||Q_k - Q_{k-1}||_inf
    double dist_qstar = 0.0;        // ||Q_k - Q*||_inf, NaN when Q* not given
    double max_gap = 0.0;           // max_s [max(row) - V_op(row)] of Q_k
    double zeta_running = 0.0;      // sup of max_gap over Q_0..Q_k
    double delta_hat_running = 0.0; // sup of per-row spread over Q_0..Q_k
    double q_min = 0.0;
    double q_max = 0.0;
};

struct IterationTrace {
    std::vector<TraceRecord> records;
    bool converged = false;
    // largest late-stage step when the tol cap was hit, 0 otherwise;
    // bounded non-convergence of the soft operator is an outcome, not an error
    double oscillation_amplitude = 0.0;

    // header: k,step_sup,dist_qstar,max_gap,zeta_running,delta_hat_running,q_min,q_max
    void write_csv(std::ostream& os) const;
};

struct QIterationResult {
    QTable q;
    IterationTrace trace;
};

/// Applies `op` from q0 until the sup-norm step drops below tol or max_iters
/// is reached. dist_qstar in the trace is filled when q_star is supplied.
QIterationResult q_iteration(const TabularMDP& mdp, const OperatorSpec& op,
                             const QTable& q0, double tol = 1e-10,
                             int max_iters = 10000,
                             const QTable* q_star = nullptr);

/// Q*: max-operator Q-iteration from zeros.
QTable solve_optimal(const TabularMDP& mdp, double tol = 1e-10);

struct BoundViolation {
    int s = 0;
    int a = 0;
    int j = 0;       // iteration index of the witness
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Side-by-side run of the max and softmax iterations.
struct Theorem1Report {
    int iterations = 0;
    double gamma = 0.0;
    double tau = 0.0;
    // entrywise T^j Q0 >= T_soft^j Q0
    std::vector<BoundViolation> domination_violations;
    // entrywise T^j Q0 - T_soft^j Q0 <= sum_{i<=j} gamma^i * zeta_running
    std::vector<BoundViolation> zeta_violations;
    double zeta = 0.0;              // running sup of the per-state gap
    double final_sup_diff = 0.0;    // ||T^k Q0 - T_soft^k Q0||_inf
    double rate_bound_final = 0.0;  // exponential-rate bound at k
    bool rate_bound_dominates = false;
    // envelope statistics over every visited table (both sequences)
    double visited_q_min = 0.0;
    double visited_q_max = 0.0;
    double delta_hat_sup = 0.0;

    bool ok() const {
        return domination_violations.empty() && zeta_violations.empty();
    }
};

Theorem1Report verify_theorem1(const TabularMDP& mdp, double tau,
                               const QTable& q0, int k);

struct ContractionProbeReport {
    double max_ratio = 0.0;
    int trials_above_gamma = 0;
    int trials_above_one = 0;
    int n_trials = 0;
    QTable witness_q1;
    QTable witness_q2;
};

/// Samples random table pairs (shared base plus independent bounded
/// perturbations) and measures the sup-norm expansion ratio of the softmax
/// backup. Purely a measurement; nothing is asserted here.
ContractionProbeReport contraction_probe(const TabularMDP& mdp, double tau,
                                         int n_trials,
                                         double perturbation_scale,
                                         std::uint64_t seed);

}  // namespace bellman
