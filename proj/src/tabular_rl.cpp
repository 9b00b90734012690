#include "bellman/tabular_rl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "bellman/csv.hpp"
#include "bellman/rng.hpp"

namespace bellman {

namespace {

int argmax_lowest(const double* row, int m) {
    int best = 0;
    for (int a = 1; a < m; ++a)
        if (row[a] > row[best]) best = a;
    return best;
}

void validate(const TabularMDP& mdp, const AgentConfig& cfg) {
    if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0))
        throw std::invalid_argument("q_learning: epsilon must be in [0,1]");
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
        throw std::invalid_argument("q_learning: alpha must be in [0,1]");
    if (cfg.episodes < 1)
        throw std::invalid_argument("q_learning: episodes must be >= 1");
    if (cfg.max_steps_per_episode < 1)
        throw std::invalid_argument("q_learning: max_steps_per_episode must be >= 1");
    if (cfg.start_state < 0 || cfg.start_state >= mdp.n_states)
        throw std::invalid_argument("q_learning: start_state out of range");
    switch (cfg.target.kind) {
        case TargetKind::Softmax:
        case TargetKind::DoubleSoftmax:
            if (cfg.target.parameter < 0.0)
                throw std::invalid_argument("q_learning: tau must be >= 0");
            break;
        case TargetKind::Mellowmax:
            if (cfg.target.parameter <= 0.0)
                throw std::invalid_argument("q_learning: omega must be > 0");
            break;
        default:
            break;
    }
}

int sample_next(const TabularMDP& mdp, int s, int a, SplitMix64& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int s2 = 0; s2 < mdp.n_states; ++s2) {
        acc += mdp.p(s, a, s2);
        if (u < acc) return s2;
    }
    return mdp.n_states - 1;  // guards against row sums a hair below 1
}

double bootstrap_value(const TargetOperator& op, const double* row_own,
                       const double* row_other, int m) {
    const QRow own(row_own, static_cast<std::size_t>(m));
    switch (op.kind) {
        case TargetKind::Max: return max_value(own);
        case TargetKind::Mean: return mean_value(own);
        case TargetKind::Softmax: return softmax_value(own, op.parameter);
        case TargetKind::Mellowmax: return mellowmax_value(own, op.parameter);
        case TargetKind::DoubleMax:
            return row_other[argmax_lowest(row_own, m)];
        case TargetKind::DoubleSoftmax: {
            const auto w = softmax_weights(own, op.parameter);
            double acc = 0.0;
            for (int a = 0; a < m; ++a) acc += w[a] * row_other[a];
            return acc;
        }
    }
    throw std::logic_error("bootstrap_value: bad kind");
}

}  // namespace

std::string TargetOperator::name() const {
    switch (kind) {
        case TargetKind::Max: return "max";
        case TargetKind::Mean: return "mean";
        case TargetKind::Softmax: return "softmax";
        case TargetKind::Mellowmax: return "mellowmax";
        case TargetKind::DoubleMax: return "double_max";
        case TargetKind::DoubleSoftmax: return "double_softmax";
    }
    return "?";
}

void LearningCurve::write_csv(std::ostream& os) const {
    os << "episode,mean_return,q_start,bias_mean,bias_max\n";
    for (const auto& pt : points) {
        os << pt.episode << ',' << fmt_double(pt.mean_return) << ','
           << fmt_double(pt.q_start) << ',' << fmt_double(pt.bias_mean) << ','
           << fmt_double(pt.bias_max) << '\n';
    }
}

QLearningResult q_learning(const TabularMDP& mdp, const AgentConfig& cfg,
                           const QTable* q_star) {
    validate(mdp, cfg);
    const bool is_double = cfg.target.kind == TargetKind::DoubleMax ||
                           cfg.target.kind == TargetKind::DoubleSoftmax;
    const int m = mdp.n_actions;

    QLearningResult res;
    res.q_a = QTable(mdp.n_states, m, cfg.q_init);
    if (is_double) res.q_b = QTable(mdp.n_states, m, cfg.q_init);

    SplitMix64 rng(seed_split(cfg.seed, "qlearn/train"));
    std::vector<double> behavior_row(m);

    const int eval_every = std::max(1, cfg.episodes / std::max(1, cfg.eval_points));

    auto combined = [&](int s, int a) {
        return is_double ? res.q_a.at(s, a) + res.q_b.at(s, a) : res.q_a.at(s, a);
    };

    auto record_point = [&](int episode) {
        QTable est(mdp.n_states, m);
        for (int s = 0; s < mdp.n_states; ++s)
            for (int a = 0; a < m; ++a)
                est.at(s, a) = is_double
                                   ? 0.5 * (res.q_a.at(s, a) + res.q_b.at(s, a))
                                   : res.q_a.at(s, a);
        CurvePoint pt;
        pt.episode = episode;
        Policy greedy(mdp.n_states, m, 0.0);
        for (int s = 0; s < mdp.n_states; ++s) {
            for (int a = 0; a < m; ++a) behavior_row[a] = combined(s, a);
            greedy.at(s, argmax_lowest(behavior_row.data(), m)) = 1.0;
        }
        pt.mean_return = evaluate_policy_return(
            mdp, greedy, cfg.eval_rollouts, cfg.eval_horizon,
            seed_split(cfg.seed, "qlearn/eval/" + std::to_string(episode)),
            cfg.start_state);
        pt.q_start = max_value(QRow(est.row(cfg.start_state),
                                    static_cast<std::size_t>(m)));
        if (q_star) {
            const auto gap = overestimation_gap(est, *q_star);
            pt.bias_mean = gap.mean;
            pt.bias_max = gap.max;
        } else {
            pt.bias_mean = std::numeric_limits<double>::quiet_NaN();
            pt.bias_max = std::numeric_limits<double>::quiet_NaN();
        }
        res.curve.points.push_back(pt);
    };

    for (int ep = 1; ep <= cfg.episodes; ++ep) {
        int s = cfg.start_state;
        for (int step = 0; step < cfg.max_steps_per_episode; ++step) {
            if (mdp.is_absorbing(s)) break;
            // epsilon-greedy on the learned table (table sum for doubles)
            int a;
            if (rng.uniform() < cfg.epsilon) {
                a = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
            } else {
                for (int i = 0; i < m; ++i) behavior_row[i] = combined(s, i);
                a = argmax_lowest(behavior_row.data(), m);
            }
            const int s2 = sample_next(mdp, s, a, rng);
            double reward = mdp.r(s, a);
            if (mdp.reward_noise_sd > 0.0)
                reward += mdp.reward_noise_sd * rng.normal();

            QTable* update = &res.q_a;
            QTable* other = is_double ? &res.q_b : &res.q_a;
            if (is_double && rng.uniform() < 0.5) std::swap(update, other);

            double boot = 0.0;
            if (!mdp.is_absorbing(s2))
                boot = bootstrap_value(cfg.target, update->row(s2),
                                       other->row(s2), m);
            const double target = reward + mdp.discount * boot;
            double& qsa = update->at(s, a);
            qsa += cfg.alpha * (target - qsa);
            s = s2;
        }
        if (ep % eval_every == 0 || ep == cfg.episodes) record_point(ep);
    }

    res.q = QTable(mdp.n_states, m);
    for (int s = 0; s < mdp.n_states; ++s)
        for (int a = 0; a < m; ++a)
            res.q.at(s, a) = is_double
                                 ? 0.5 * (res.q_a.at(s, a) + res.q_b.at(s, a))
                                 : res.q_a.at(s, a);
    return res;
}

double evaluate_policy_return(const TabularMDP& mdp, const Policy& policy,
                              int n_episodes, int horizon, std::uint64_t seed,
                              int start_state) {
    if (n_episodes < 1 || horizon < 1)
        throw std::invalid_argument("evaluate_policy_return: bad sizes");
    SplitMix64 rng(seed);
    double total = 0.0, comp = 0.0;
    for (int ep = 0; ep < n_episodes; ++ep) {
        int s = start_state;
        double ret = 0.0, disc = 1.0;
        for (int step = 0; step < horizon; ++step) {
            if (mdp.is_absorbing(s)) break;
            const double u = rng.uniform();
            double acc = 0.0;
            int a = mdp.n_actions - 1;
            for (int i = 0; i < mdp.n_actions; ++i) {
                acc += policy.at(s, i);
                if (u < acc) {
                    a = i;
                    break;
                }
            }
            ret += disc * mdp.r(s, a);
            disc *= mdp.discount;
            s = sample_next(mdp, s, a, rng);
        }
        const double y = ret - comp;
        const double t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    return total / static_cast<double>(n_episodes);
}

GapSummary overestimation_gap(const QTable& q_est, const QTable& q_star) {
    if (q_est.n_states != q_star.n_states || q_est.n_actions != q_star.n_actions)
        throw std::invalid_argument("overestimation_gap: shape mismatch");
    GapSummary out;
    out.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t i = 0; i < q_est.values.size(); ++i) {
        const double d = q_est.values[i] - q_star.values[i];
        sum += d;
        out.max = std::max(out.max, d);
    }
    out.mean = sum / static_cast<double>(q_est.values.size());
    return out;
}

}  // namespace bellman
