#include "bellman/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>

#include "bellman/backup_ops.hpp"
#include "bellman/rng.hpp"
#include "json.hpp"

namespace bellman {

namespace {

constexpr double kRowSumTol = 1e-12;

std::string format_issue(const char* fmt, ...) {
    char buf[160];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

}  // namespace

double TabularMDP::r_min() const {
    return *std::min_element(reward.begin(), reward.end());
}

double TabularMDP::r_max() const {
    return *std::max_element(reward.begin(), reward.end());
}

double QTable::min_entry() const {
    return *std::min_element(values.begin(), values.end());
}

double QTable::max_entry() const {
    return *std::max_element(values.begin(), values.end());
}

ValidationResult validate_mdp(const TabularMDP& mdp) {
    ValidationResult res;
    if (mdp.n_states < 1 || mdp.n_actions < 1) {
        res.issues.push_back(format_issue("dimensions (%d states, %d actions) not positive",
                                          mdp.n_states, mdp.n_actions));
        return res;
    }
    const auto ns = static_cast<std::size_t>(mdp.n_states);
    const auto na = static_cast<std::size_t>(mdp.n_actions);
    if (mdp.transition.size() != ns * na * ns)
        res.issues.push_back(format_issue("transition table has %zu entries, expected %zu",
                                          mdp.transition.size(), ns * na * ns));
    if (mdp.reward.size() != ns * na)
        res.issues.push_back(format_issue("reward table has %zu entries, expected %zu",
                                          mdp.reward.size(), ns * na));
    if (!res.issues.empty()) return res;

    if (!(mdp.discount > 0.0 && mdp.discount < 1.0))
        res.issues.push_back("discount not in (0,1)");

    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < mdp.n_states; ++s2) {
                const double p = mdp.p(s, a, s2);
                if (!(p >= 0.0 && p <= 1.0))
                    res.issues.push_back(format_issue(
                        "transition (%d,%d,%d) = %g outside [0,1]", s, a, s2, p));
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTol)
                res.issues.push_back(
                    format_issue("row (%d,%d) sums to %.17g", s, a, sum));
            if (!std::isfinite(mdp.r(s, a)))
                res.issues.push_back(format_issue("reward (%d,%d) not finite", s, a));
        }
    }
    return res;
}

TabularMDP random_mdp(int n_states, int n_actions, int branching,
                      double reward_lo, double reward_hi, std::uint64_t seed,
                      double discount) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("random_mdp: sizes must be positive");
    if (branching < 1 || branching > n_states)
        throw std::invalid_argument("random_mdp: branching must be in [1, n_states]");
    if (reward_lo > reward_hi)
        throw std::invalid_argument("random_mdp: reward_lo > reward_hi");
    if (!(discount > 0.0 && discount < 1.0))
        throw std::invalid_argument("random_mdp: discount not in (0,1)");

    TabularMDP mdp;
    mdp.n_states = n_states;
    mdp.n_actions = n_actions;
    mdp.discount = discount;
    mdp.transition.assign(
        static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
    mdp.reward.resize(static_cast<std::size_t>(n_states) * n_actions);

    SplitMix64 rng(seed);
    std::vector<int> idx(n_states);
    std::vector<int> successors(branching);
    std::vector<double> weights(branching);

    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            // partial Fisher-Yates for `branching` distinct successors
            std::iota(idx.begin(), idx.end(), 0);
            for (int j = 0; j < branching; ++j) {
                const int pick =
                    j + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_states - j)));
                std::swap(idx[j], idx[pick]);
                successors[j] = idx[j];
            }
            // Dirichlet(1,...,1) via normalized exponentials
            double total = 0.0;
            for (int j = 0; j < branching; ++j) {
                weights[j] = -std::log(1.0 - rng.uniform());
                total += weights[j];
            }
            if (total <= 0.0) {  // only possible when every draw underflows
                std::fill(weights.begin(), weights.end(), 1.0);
                total = branching;
            }
            for (int j = 0; j < branching; ++j)
                mdp.p(s, a, successors[j]) = weights[j] / total;
            // renormalize so the row sums to 1 exactly within tolerance
            double sum = 0.0;
            for (int s2 = 0; s2 < n_states; ++s2) sum += mdp.p(s, a, s2);
            for (int s2 = 0; s2 < n_states; ++s2) mdp.p(s, a, s2) /= sum;

            mdp.r(s, a) = rng.uniform(reward_lo, reward_hi);
        }
    }
    return mdp;
}

TabularMDP gridworld(const GridworldConfig& cfg) {
    if (cfg.width < 1 || cfg.height < 1)
        throw std::invalid_argument("gridworld: width and height must be >= 1");
    if (!(cfg.noise >= 0.0 && cfg.noise < 1.0))
        throw std::invalid_argument("gridworld: noise must be in [0,1)");
    if (!(cfg.discount > 0.0 && cfg.discount < 1.0))
        throw std::invalid_argument("gridworld: discount not in (0,1)");
    const int n = cfg.width * cfg.height;
    for (int g : cfg.goal_cells)
        if (g < 0 || g >= n)
            throw std::invalid_argument("gridworld: goal cell out of range");

    TabularMDP mdp;
    mdp.n_states = n;
    mdp.n_actions = 4;
    mdp.discount = cfg.discount;
    mdp.reward_noise_sd = cfg.reward_noise_sd;
    mdp.transition.assign(static_cast<std::size_t>(n) * 4 * n, 0.0);
    mdp.reward.assign(static_cast<std::size_t>(n) * 4, 0.0);
    mdp.absorbing.assign(n, 0);
    for (int g : cfg.goal_cells) mdp.absorbing[g] = 1;

    const int dx[4] = {0, 0, -1, 1};  // up, down, left, right
    const int dy[4] = {-1, 1, 0, 0};
    auto move = [&](int s, int a) {
        const int x = s % cfg.width, y = s / cfg.width;
        const int nx = x + dx[a], ny = y + dy[a];
        if (nx < 0 || nx >= cfg.width || ny < 0 || ny >= cfg.height) return s;
        return ny * cfg.width + nx;
    };
    // perpendicular slip directions per action
    const int perp[4][2] = {{kLeft, kRight}, {kLeft, kRight}, {kUp, kDown}, {kUp, kDown}};

    for (int s = 0; s < n; ++s) {
        for (int a = 0; a < 4; ++a) {
            if (mdp.absorbing[s]) {
                mdp.p(s, a, s) = 1.0;
                continue;
            }
            mdp.p(s, a, move(s, a)) += 1.0 - cfg.noise;
            mdp.p(s, a, move(s, perp[a][0])) += cfg.noise / 2.0;
            mdp.p(s, a, move(s, perp[a][1])) += cfg.noise / 2.0;
            double p_goal = 0.0;
            for (int g : cfg.goal_cells) p_goal += mdp.p(s, a, g);
            mdp.r(s, a) = cfg.step_reward + cfg.goal_reward * p_goal;
        }
    }
    return mdp;
}

Policy greedy_policy(const QTable& q) {
    Policy pi(q.n_states, q.n_actions, 0.0);
    for (int s = 0; s < q.n_states; ++s) {
        int best = 0;
        for (int a = 1; a < q.n_actions; ++a)
            if (q.at(s, a) > q.at(s, best)) best = a;
        pi.at(s, best) = 1.0;
    }
    return pi;
}

Policy softmax_policy(const QTable& q, double tau) {
    if (tau < 0.0) throw std::invalid_argument("softmax_policy: tau must be >= 0");
    Policy pi(q.n_states, q.n_actions, 0.0);
    for (int s = 0; s < q.n_states; ++s) {
        const auto w = softmax_weights(
            QRow(q.row(s), static_cast<std::size_t>(q.n_actions)), tau);
        std::copy(w.begin(), w.end(), &pi.at(s, 0));
    }
    return pi;
}

PolicyEvalResult policy_evaluation(const TabularMDP& mdp, const Policy& policy,
                                   double tol, int max_iters) {
    if (policy.n_states != mdp.n_states || policy.n_actions != mdp.n_actions)
        throw std::invalid_argument("policy_evaluation: policy/mdp dimension mismatch");
    if (tol <= 0.0) throw std::invalid_argument("policy_evaluation: tol must be > 0");

    QTable q(mdp.n_states, mdp.n_actions, 0.0);
    QTable next(mdp.n_states, mdp.n_actions, 0.0);
    std::vector<double> v(mdp.n_states);
    for (int it = 1; it <= max_iters; ++it) {
        for (int s = 0; s < mdp.n_states; ++s) {
            double acc = 0.0;
            for (int a = 0; a < mdp.n_actions; ++a)
                acc += policy.at(s, a) * q.at(s, a);
            v[s] = acc;
        }
        double step = 0.0;
        for (int s = 0; s < mdp.n_states; ++s) {
            for (int a = 0; a < mdp.n_actions; ++a) {
                double exp_v = 0.0;
                for (int s2 = 0; s2 < mdp.n_states; ++s2)
                    exp_v += mdp.p(s, a, s2) * v[s2];
                next.at(s, a) = mdp.r(s, a) + mdp.discount * exp_v;
                step = std::max(step, std::abs(next.at(s, a) - q.at(s, a)));
            }
        }
        std::swap(q, next);
        if (step < tol) return {std::move(q), it};
    }
    throw NonConvergenceError("policy_evaluation: max_iters exceeded", std::move(q));
}

std::string mdp_to_text(const TabularMDP& mdp) {
    nlohmann::json j;
    j["n_states"] = mdp.n_states;
    j["n_actions"] = mdp.n_actions;
    j["gamma"] = mdp.discount;
    j["rewards"] = mdp.reward;
    auto transitions = nlohmann::json::array();
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < mdp.n_actions; ++a)
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                if (mdp.p(s, a, s2) != 0.0)
                    transitions.push_back({s, a, s2, mdp.p(s, a, s2)});
    j["transitions"] = std::move(transitions);
    return j.dump(2);
}

TabularMDP mdp_from_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("mdp_from_text: ") + e.what());
    }
    TabularMDP mdp;
    try {
        mdp.n_states = j.at("n_states").get<int>();
        mdp.n_actions = j.at("n_actions").get<int>();
        mdp.discount = j.at("gamma").get<double>();
        mdp.reward = j.at("rewards").get<std::vector<double>>();
        mdp.transition.assign(static_cast<std::size_t>(mdp.n_states) *
                                  mdp.n_actions * mdp.n_states,
                              0.0);
        for (const auto& entry : j.at("transitions")) {
            const int s = entry.at(0).get<int>();
            const int a = entry.at(1).get<int>();
            const int s2 = entry.at(2).get<int>();
            if (s < 0 || s >= mdp.n_states || a < 0 || a >= mdp.n_actions ||
                s2 < 0 || s2 >= mdp.n_states)
                throw std::invalid_argument("mdp_from_text: transition index out of range");
            mdp.p(s, a, s2) = entry.at(3).get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("mdp_from_text: ") + e.what());
    }
    if (mdp.reward.size() !=
        static_cast<std::size_t>(mdp.n_states) * mdp.n_actions)
        throw std::invalid_argument("mdp_from_text: rewards size mismatch");
    return mdp;
}

}  // namespace bellman
