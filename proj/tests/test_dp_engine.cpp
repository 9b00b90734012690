#include <cmath>
#include <sstream>

#include "bellman/bounds.hpp"
#include "bellman/dp_engine.hpp"
#include "bellman/rng.hpp"
#include "doctest.h"

using namespace bellman;

namespace {

TabularMDP single_state_mdp(double reward, double gamma) {
    TabularMDP m;
    m.n_states = 1;
    m.n_actions = 1;
    m.transition = {1.0};
    m.reward = {reward};
    m.discount = gamma;
    return m;
}

double sup_diff(const QTable& a, const QTable& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return d;
}

}  // namespace

TEST_CASE("q_iteration on a single-state MDP reaches 1/(1-gamma) for every operator") {
    const TabularMDP m = single_state_mdp(1.0, 0.5);
    QTable q0(1, 1, 0.0);
    for (const auto& op : {OperatorSpec::max(), OperatorSpec::mean(),
                           OperatorSpec::softmax(3.0), OperatorSpec::mellowmax(3.0)}) {
        const auto res = q_iteration(m, op, q0);
        CHECK(res.trace.converged);
        CHECK(res.q.at(0, 0) == doctest::Approx(2.0).epsilon(1e-8));
    }
}

TEST_CASE("q_iteration fixed point has a small Bellman residual") {
    const TabularMDP m = random_mdp(5, 3, 2, -1.0, 1.0, 17, 0.9);
    QTable q0(5, 3, 0.0);
    const double tol = 1e-10;
    const auto res = q_iteration(m, OperatorSpec::max(), q0, tol);
    REQUIRE(res.trace.converged);
    const QTable next = backup(m, OperatorSpec::max(), res.q);
    CHECK(sup_diff(next, res.q) <=
          tol * (1.0 + m.discount) / (1.0 - m.discount));
}

TEST_CASE("long-horizon softmax iterate stays below the max iterate entrywise") {
    const TabularMDP m = random_mdp(5, 3, 2, -1.0, 1.0, 17, 0.9);
    QTable q_max(5, 3, 0.0), q_soft(5, 3, 0.0);
    for (int j = 0; j < 500; ++j) {
        q_max = backup(m, OperatorSpec::max(), q_max);
        q_soft = backup(m, OperatorSpec::softmax(5.0), q_soft);
    }
    for (std::size_t i = 0; i < q_max.values.size(); ++i)
        CHECK(q_soft.values[i] <= q_max.values[i] + 1e-12);
}

TEST_CASE("solve_optimal matches hand computation on the 1x2 gridworld") {
    GridworldConfig cfg;
    cfg.width = 2;
    cfg.height = 1;
    cfg.goal_cells = {1};
    const TabularMDP m = gridworld(cfg);
    const QTable q_star = solve_optimal(m);
    // entering the goal pays 1; the goal is absorbing with zero reward
    CHECK(q_star.at(0, kRight) == doctest::Approx(1.0).epsilon(1e-9));
    // staying in place discounts the eventual goal entry by one step
    CHECK(q_star.at(0, kLeft) == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("solve_optimal is positively homogeneous in the rewards") {
    TabularMDP m = random_mdp(4, 2, 2, -1.0, 1.0, 18, 0.9);
    const QTable q1 = solve_optimal(m);
    for (auto& r : m.reward) r *= 3.0;
    const QTable q3 = solve_optimal(m);
    for (std::size_t i = 0; i < q1.values.size(); ++i)
        CHECK(q3.values[i] == doctest::Approx(3.0 * q1.values[i]).epsilon(1e-7));
}

TEST_CASE("trace CSV uses the fixed header and nondecreasing running stats") {
    const TabularMDP m = random_mdp(4, 3, 2, -1.0, 1.0, 19, 0.9);
    QTable q0(4, 3, 0.0);
    const auto res = q_iteration(m, OperatorSpec::softmax(2.0), q0, 1e-10, 300);
    std::ostringstream os;
    res.trace.write_csv(os);
    const std::string text = os.str();
    CHECK(text.rfind("k,step_sup,dist_qstar,max_gap,zeta_running,"
                     "delta_hat_running,q_min,q_max\n", 0) == 0);
    double zeta = -1.0, dh = -1.0;
    for (const auto& rec : res.trace.records) {
        CHECK(rec.zeta_running >= zeta);
        CHECK(rec.delta_hat_running >= dh);
        zeta = rec.zeta_running;
        dh = rec.delta_hat_running;
    }
}

TEST_CASE("soft iteration stays inside the discounted reward envelope") {
    const TabularMDP m = random_mdp(6, 3, 2, -1.0, 1.0, 20, 0.9);
    QTable q0(6, 3, 0.0);
    const auto res = q_iteration(m, OperatorSpec::softmax(1.0), q0, 1e-10, 500);
    const double lo = std::min(m.r_min(), 0.0) / (1.0 - m.discount);
    const double hi = std::max(m.r_max(), 0.0) / (1.0 - m.discount);
    for (const auto& rec : res.trace.records) {
        CHECK(rec.q_min >= lo - 1e-9);
        CHECK(rec.q_max <= hi + 1e-9);
        // per-state spread bound from the same envelope
        CHECK(rec.delta_hat_running <=
              pairwise_gap_bound(std::max(m.r_max(), -m.r_min()), m.discount) + 1e-9);
    }
}

TEST_CASE("verify_theorem1 with the huge-tau surrogate sees negligible differences") {
    const TabularMDP m = random_mdp(5, 3, 2, -1.0, 1.0, 21, 0.9);
    QTable q0(5, 3, 0.0);
    const auto rep = verify_theorem1(m, 1e6, q0, 100);
    CHECK(rep.ok());
    const double q_abs = std::max(std::abs(rep.visited_q_min),
                                  std::abs(rep.visited_q_max));
    CHECK(rep.final_sup_diff <= 1e-6 * q_abs + 1e-9);
}

TEST_CASE("verify_theorem1 at tau 0 (mean backup) keeps entrywise domination") {
    const TabularMDP m = random_mdp(5, 3, 2, -1.0, 1.0, 22, 0.9);
    QTable q0(5, 3, 0.0);
    const auto rep = verify_theorem1(m, 0.0, q0, 100);
    CHECK(rep.domination_violations.empty());
    CHECK(rep.zeta_violations.empty());
}

TEST_CASE("verify_theorem1 passes all checks on a mid-temperature run") {
    const TabularMDP m = random_mdp(6, 4, 2, -1.0, 1.0, 3, 0.9);
    QTable q0(6, 4, 0.0);
    const auto rep = verify_theorem1(m, 2.0, q0, 200);
    CHECK(rep.ok());
    CHECK(rep.zeta >= 0.0);
    CHECK(rep.final_sup_diff >= 0.0);
    CHECK(rep.rate_bound_dominates);
    CHECK_THROWS_AS(verify_theorem1(m, 2.0, q0, 0), std::invalid_argument);
    CHECK_THROWS_AS(verify_theorem1(m, -1.0, q0, 10), std::invalid_argument);
}

TEST_CASE("contraction_probe: huge-tau and tau-0 backups contract by gamma") {
    const TabularMDP m = random_mdp(5, 3, 2, -1.0, 1.0, 23, 0.9);
    for (double tau : {1e6, 0.0}) {
        const auto rep = contraction_probe(m, tau, 500, 0.5, seed_split(23, "probe"));
        CHECK(rep.max_ratio <= m.discount + 1e-9);
        CHECK(rep.trials_above_gamma == 0);
        CHECK(rep.trials_above_one == 0);
    }
}

TEST_CASE("contraction_probe at intermediate tau is a measurement, not an assertion") {
    const TabularMDP m = random_mdp(2, 2, 2, -1.0, 1.0, 24, 0.9);
    const auto rep = contraction_probe(m, 2.0, 500, 0.5, 77);
    CHECK(rep.n_trials == 500);
    CHECK(rep.max_ratio > 0.0);
    CHECK(rep.witness_q1.n_states == 2);
}
