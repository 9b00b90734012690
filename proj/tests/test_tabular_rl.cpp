#include <cmath>
#include <sstream>

#include "bellman/dp_engine.hpp"
#include "bellman/rng.hpp"
#include "bellman/tabular_rl.hpp"
#include "doctest.h"

using namespace bellman;

namespace {

TabularMDP chain_1x2() {
    GridworldConfig cfg;
    cfg.width = 2;
    cfg.height = 1;
    cfg.goal_cells = {1};
    return gridworld(cfg);
}

}  // namespace

TEST_CASE("q_learning solves the deterministic 1x2 gridworld with every target") {
    const TabularMDP m = chain_1x2();
    const QTable q_star = solve_optimal(m);
    for (const auto& target :
         {TargetOperator::max(), TargetOperator::mean(), TargetOperator::softmax(5.0),
          TargetOperator::mellowmax(5.0), TargetOperator::double_max(),
          TargetOperator::double_softmax(5.0)}) {
        AgentConfig cfg;
        cfg.target = target;
        cfg.epsilon = 0.1;
        cfg.alpha = 0.5;
        cfg.episodes = 500;
        cfg.seed = 42;
        cfg.eval_points = 5;
        const auto res = q_learning(m, cfg, &q_star);
        CHECK(std::abs(res.q.at(0, kRight) - q_star.at(0, kRight)) <= 0.05);
        // greedy policy reaches the goal: final evaluated return is V*(0) = 1
        CHECK(res.curve.points.back().mean_return == doctest::Approx(1.0));
    }
}

TEST_CASE("huge-tau softmax target reproduces the max-target run exactly") {
    const TabularMDP m = chain_1x2();  // reward noise 0, deterministic moves
    AgentConfig a;
    a.target = TargetOperator::max();
    a.epsilon = 0.1;
    a.alpha = 0.5;
    a.episodes = 500;
    a.seed = 7;
    AgentConfig b = a;
    b.target = TargetOperator::softmax(1e6);
    const auto ra = q_learning(m, a);
    const auto rb = q_learning(m, b);
    CHECK(ra.q.values == rb.q.values);
    REQUIRE(ra.curve.points.size() == rb.curve.points.size());
    for (std::size_t i = 0; i < ra.curve.points.size(); ++i) {
        CHECK(ra.curve.points[i].mean_return == rb.curve.points[i].mean_return);
        CHECK(ra.curve.points[i].q_start == rb.curve.points[i].q_start);
    }
}

TEST_CASE("zero learning rate leaves the table at its initialization") {
    const TabularMDP m = chain_1x2();
    AgentConfig cfg;
    cfg.alpha = 0.0;
    cfg.episodes = 50;
    cfg.q_init = 0.25;
    const auto res = q_learning(m, cfg);
    for (double v : res.q.values) CHECK(v == 0.25);
}

TEST_CASE("q_learning is bit-deterministic given the seed") {
    GridworldConfig gcfg;
    gcfg.width = 3;
    gcfg.height = 3;
    gcfg.noise = 0.1;
    gcfg.goal_cells = {8};
    gcfg.reward_noise_sd = 0.5;
    const TabularMDP m = gridworld(gcfg);
    AgentConfig cfg;
    cfg.target = TargetOperator::softmax(2.0);
    cfg.episodes = 200;
    cfg.seed = 99;
    const auto a = q_learning(m, cfg);
    const auto b = q_learning(m, cfg);
    CHECK(a.q.values == b.q.values);
    for (std::size_t i = 0; i < a.curve.points.size(); ++i)
        CHECK(a.curve.points[i].mean_return == b.curve.points[i].mean_return);
}

TEST_CASE("q_learning validates its configuration") {
    const TabularMDP m = chain_1x2();
    AgentConfig cfg;
    cfg.epsilon = 1.5;
    CHECK_THROWS_AS(q_learning(m, cfg), std::invalid_argument);
    cfg = {};
    cfg.episodes = 0;
    CHECK_THROWS_AS(q_learning(m, cfg), std::invalid_argument);
    cfg = {};
    cfg.start_state = 99;
    CHECK_THROWS_AS(q_learning(m, cfg), std::invalid_argument);
    cfg = {};
    cfg.target = TargetOperator::mellowmax(0.0);
    CHECK_THROWS_AS(q_learning(m, cfg), std::invalid_argument);
}

TEST_CASE("learning curve CSV uses the fixed header") {
    const TabularMDP m = chain_1x2();
    AgentConfig cfg;
    cfg.episodes = 20;
    cfg.eval_points = 2;
    const auto res = q_learning(m, cfg);
    std::ostringstream os;
    res.curve.write_csv(os);
    CHECK(os.str().rfind("episode,mean_return,q_start,bias_mean,bias_max\n", 0) == 0);
}

TEST_CASE("evaluate_policy_return recovers V* on the deterministic chain") {
    const TabularMDP m = chain_1x2();
    const QTable q_star = solve_optimal(m);
    const Policy pi = greedy_policy(q_star);
    const double ret = evaluate_policy_return(m, pi, 50, 100, 5);
    CHECK(ret == doctest::Approx(q_star.at(0, kRight)).epsilon(1e-9));
}

TEST_CASE("evaluate_policy_return matches policy evaluation for a uniform policy") {
    GridworldConfig gcfg;
    gcfg.width = 3;
    gcfg.height = 3;
    gcfg.noise = 0.2;
    gcfg.goal_cells = {8};
    const TabularMDP m = gridworld(gcfg);
    Policy uniform(m.n_states, m.n_actions, 0.25);
    const auto pe = policy_evaluation(m, uniform);
    double v0 = 0.0;
    for (int a = 0; a < m.n_actions; ++a) v0 += 0.25 * pe.q.at(0, a);
    const double mc = evaluate_policy_return(m, uniform, 20000, 300, 6);
    CHECK(std::abs(mc - v0) <= 0.02);
}

TEST_CASE("horizon truncation error obeys the geometric tail bound") {
    // one recurrent state, unit reward: return(h) = (1 - gamma^h)/(1 - gamma)
    TabularMDP m;
    m.n_states = 1;
    m.n_actions = 1;
    m.transition = {1.0};
    m.reward = {1.0};
    m.discount = 0.9;
    Policy pi(1, 1, 1.0);
    const double full = 1.0 / (1.0 - m.discount);
    const double truncated = evaluate_policy_return(m, pi, 1, 50, 1);
    CHECK(full - truncated <=
          std::pow(m.discount, 50) * m.r_max() / (1.0 - m.discount) + 1e-12);
    CHECK(truncated == doctest::Approx((1.0 - std::pow(0.9, 50)) / 0.1).epsilon(1e-12));
}

TEST_CASE("overestimation_gap summary statistics") {
    QTable q_star(2, 2, 1.0);
    QTable same = q_star;
    const auto zero = overestimation_gap(same, q_star);
    CHECK(zero.mean == 0.0);
    CHECK(zero.max == 0.0);
    QTable plus = q_star;
    for (auto& v : plus.values) v += 1.0;
    const auto one = overestimation_gap(plus, q_star);
    CHECK(one.mean == doctest::Approx(1.0));
    CHECK(one.max == doctest::Approx(1.0));
    QTable wrong(3, 2, 0.0);
    CHECK_THROWS_AS(overestimation_gap(wrong, q_star), std::invalid_argument);
}

TEST_CASE("max target overestimates more than softmax on a noisy gridworld") {
    GridworldConfig gcfg;
    gcfg.width = 3;
    gcfg.height = 3;
    gcfg.goal_cells = {8};
    gcfg.reward_noise_sd = 1.0;
    const TabularMDP m = gridworld(gcfg);
    const QTable q_star = solve_optimal(m);
    double bias_max = 0.0, bias_soft = 0.0;
    for (int seed = 0; seed < 5; ++seed) {
        AgentConfig cfg;
        cfg.alpha = 0.5;
        cfg.episodes = 1000;
        cfg.eval_points = 1;
        cfg.eval_rollouts = 1;
        cfg.seed = seed_split(1234, "bias/" + std::to_string(seed));
        cfg.target = TargetOperator::max();
        bias_max += overestimation_gap(q_learning(m, cfg, &q_star).q, q_star).mean;
        cfg.target = TargetOperator::softmax(5.0);
        bias_soft += overestimation_gap(q_learning(m, cfg, &q_star).q, q_star).mean;
    }
    CHECK(bias_max > bias_soft);  // directional claim, aggregated over seeds
}
