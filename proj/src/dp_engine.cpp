#include "bellman/dp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "bellman/bounds.hpp"
#include "bellman/csv.hpp"
#include "bellman/rng.hpp"

namespace bellman {

namespace {

double sup_diff(const QTable& a, const QTable& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

// max over states of [max(row) - V_op(row)]
double table_max_gap(const QTable& q, const OperatorSpec& op) {
    double g = 0.0;
    for (int s = 0; s < q.n_states; ++s) {
        const QRow row(q.row(s), static_cast<std::size_t>(q.n_actions));
        g = std::max(g, max_value(row) - operator_value(op, row));
    }
    return g;
}

double table_delta_hat(const QTable& q) {
    double d = 0.0;
    for (int s = 0; s < q.n_states; ++s)
        d = std::max(d, delta_hat(QRow(q.row(s),
                                       static_cast<std::size_t>(q.n_actions))));
    return d;
}

// softmax gap of the worst state, plus that state's index
std::pair<double, int> worst_state_gap(const QTable& q, double tau) {
    double g = 0.0;
    int state = 0;
    for (int s = 0; s < q.n_states; ++s) {
        const double gs = gap(QRow(q.row(s), static_cast<std::size_t>(q.n_actions)), tau);
        if (gs > g) {
            g = gs;
            state = s;
        }
    }
    return {g, state};
}

}  // namespace

void IterationTrace::write_csv(std::ostream& os) const {
    os << "k,step_sup,dist_qstar,max_gap,zeta_running,delta_hat_running,q_min,q_max\n";
    for (const auto& rec : records) {
        os << rec.k << ',' << fmt_double(rec.step_sup) << ','
           << fmt_double(rec.dist_qstar) << ',' << fmt_double(rec.max_gap) << ','
           << fmt_double(rec.zeta_running) << ','
           << fmt_double(rec.delta_hat_running) << ',' << fmt_double(rec.q_min)
           << ',' << fmt_double(rec.q_max) << '\n';
    }
}

QIterationResult q_iteration(const TabularMDP& mdp, const OperatorSpec& op,
                             const QTable& q0, double tol, int max_iters,
                             const QTable* q_star) {
    if (q0.n_states != mdp.n_states || q0.n_actions != mdp.n_actions)
        throw std::invalid_argument("q_iteration: q0/mdp dimension mismatch");
    if (tol <= 0.0) throw std::invalid_argument("q_iteration: tol must be > 0");

    QIterationResult res;
    res.q = q0;
    double zeta = table_max_gap(q0, op);
    double dh = table_delta_hat(q0);

    for (int k = 1; k <= max_iters; ++k) {
        QTable next = backup(mdp, op, res.q);
        TraceRecord rec;
        rec.k = k;
        rec.step_sup = sup_diff(next, res.q);
        rec.dist_qstar = q_star ? sup_diff(next, *q_star)
                                : std::numeric_limits<double>::quiet_NaN();
        rec.max_gap = table_max_gap(next, op);
        zeta = std::max(zeta, rec.max_gap);
        dh = std::max(dh, table_delta_hat(next));
        rec.zeta_running = zeta;
        rec.delta_hat_running = dh;
        rec.q_min = next.min_entry();
        rec.q_max = next.max_entry();
        res.trace.records.push_back(rec);
        res.q = std::move(next);
        if (rec.step_sup < tol) {
            res.trace.converged = true;
            return res;
        }
    }
    // cap hit: report the residual band instead of failing
    double amp = 0.0;
    const std::size_t n = res.trace.records.size();
    for (std::size_t i = n > 20 ? n - 20 : 0; i < n; ++i)
        amp = std::max(amp, res.trace.records[i].step_sup);
    res.trace.oscillation_amplitude = amp;
    return res;
}

QTable solve_optimal(const TabularMDP& mdp, double tol) {
    QTable q0(mdp.n_states, mdp.n_actions, 0.0);
    return q_iteration(mdp, OperatorSpec::max(), q0, tol).q;
}

Theorem1Report verify_theorem1(const TabularMDP& mdp, double tau,
                               const QTable& q0, int k) {
    if (k < 1) throw std::invalid_argument("verify_theorem1: k must be >= 1");
    if (tau < 0.0) throw std::invalid_argument("verify_theorem1: tau must be >= 0");

    Theorem1Report rep;
    rep.iterations = k;
    rep.gamma = mdp.discount;
    rep.tau = tau;

    const OperatorSpec soft = tau == 0.0 ? OperatorSpec::mean()
                                         : OperatorSpec::softmax(tau);
    QTable q_max_it = q0;
    QTable q_soft_it = q0;

    auto [zeta0, zstate0] = worst_state_gap(q0, tau);
    rep.zeta = zeta0;
    int zeta_state = zstate0;
    QTable zeta_table = q0;  // iterate whose state realizes the running zeta

    rep.visited_q_min = q0.min_entry();
    rep.visited_q_max = q0.max_entry();
    rep.delta_hat_sup = table_delta_hat(q0);

    for (int j = 1; j <= k; ++j) {
        q_max_it = backup(mdp, OperatorSpec::max(), q_max_it);
        q_soft_it = backup(mdp, soft, q_soft_it);

        // bound built from gaps of iterates 0..j-1, matching the induction
        const double bound = rep.zeta > 0.0
                                 ? zeta_accumulation_bound(j, mdp.discount, rep.zeta)
                                 : 0.0;
        for (int s = 0; s < mdp.n_states; ++s) {
            for (int a = 0; a < mdp.n_actions; ++a) {
                const double diff = q_max_it.at(s, a) - q_soft_it.at(s, a);
                if (diff < -1e-12)
                    rep.domination_violations.push_back(
                        {s, a, j, q_max_it.at(s, a), q_soft_it.at(s, a)});
                if (diff > bound + 1e-9)
                    rep.zeta_violations.push_back({s, a, j, diff, bound});
            }
        }

        auto [g, gs] = worst_state_gap(q_soft_it, tau);
        if (g > rep.zeta) {
            rep.zeta = g;
            zeta_state = gs;
            zeta_table = q_soft_it;
        }
        rep.visited_q_min = std::min({rep.visited_q_min, q_soft_it.min_entry(),
                                      q_max_it.min_entry()});
        rep.visited_q_max = std::max({rep.visited_q_max, q_soft_it.max_entry(),
                                      q_max_it.max_entry()});
        rep.delta_hat_sup = std::max({rep.delta_hat_sup,
                                      table_delta_hat(q_soft_it),
                                      table_delta_hat(q_max_it)});
    }

    double final_diff = 0.0;
    for (std::size_t i = 0; i < q_max_it.values.size(); ++i)
        final_diff = std::max(final_diff,
                              q_max_it.values[i] - q_soft_it.values[i]);
    rep.final_sup_diff = final_diff;

    // rate bound from the worst-gap state's sorted delta vector
    std::vector<double> deltas(static_cast<std::size_t>(mdp.n_actions));
    {
        const QRow row(zeta_table.row(zeta_state),
                       static_cast<std::size_t>(mdp.n_actions));
        const double top = max_value(row);
        for (std::size_t i = 0; i < deltas.size(); ++i) deltas[i] = top - row[i];
        std::sort(deltas.begin(), deltas.end());
    }
    rep.rate_bound_final = exponential_rate_bound(k, mdp.discount, tau, deltas);
    rep.rate_bound_dominates = rep.final_sup_diff <= rep.rate_bound_final + 1e-9;
    return rep;
}

ContractionProbeReport contraction_probe(const TabularMDP& mdp, double tau,
                                         int n_trials,
                                         double perturbation_scale,
                                         std::uint64_t seed) {
    if (n_trials < 1)
        throw std::invalid_argument("contraction_probe: n_trials must be >= 1");
    const OperatorSpec soft = tau == 0.0 ? OperatorSpec::mean()
                                         : OperatorSpec::softmax(tau);
    ContractionProbeReport rep;
    rep.n_trials = n_trials;
    SplitMix64 rng(seed);
    const std::size_t n = static_cast<std::size_t>(mdp.n_states) * mdp.n_actions;

    QTable base(mdp.n_states, mdp.n_actions), q1 = base, q2 = base;
    for (int t = 0; t < n_trials; ++t) {
        for (std::size_t i = 0; i < n; ++i) base.values[i] = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            q1.values[i] = base.values[i] +
                           rng.uniform(-perturbation_scale, perturbation_scale);
        for (std::size_t i = 0; i < n; ++i)
            q2.values[i] = base.values[i] +
                           rng.uniform(-perturbation_scale, perturbation_scale);
        const double denom = sup_diff(q1, q2);
        if (denom < 1e-12) continue;
        const double num = sup_diff(backup(mdp, soft, q1), backup(mdp, soft, q2));
        const double ratio = num / denom;
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.witness_q1 = q1;
            rep.witness_q2 = q2;
        }
        if (ratio > mdp.discount) ++rep.trials_above_gamma;
        if (ratio > 1.0) ++rep.trials_above_one;
    }
    return rep;
}

}  // namespace bellman
