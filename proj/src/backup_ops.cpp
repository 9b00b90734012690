#include "bellman/backup_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bellman {

OperatorSpec OperatorSpec::softmax(double tau) {
    if (tau < 0.0) throw std::invalid_argument("OperatorSpec: tau must be >= 0");
    return {OperatorKind::Softmax, tau};
}

OperatorSpec OperatorSpec::mellowmax(double omega) {
    if (omega <= 0.0) throw std::invalid_argument("OperatorSpec: omega must be > 0");
    return {OperatorKind::Mellowmax, omega};
}

std::string OperatorSpec::name() const {
    switch (kind) {
        case OperatorKind::Max: return "max";
        case OperatorKind::Mean: return "mean";
        case OperatorKind::Softmax: return "softmax";
        case OperatorKind::Mellowmax: return "mellowmax";
    }
    return "?";
}

double max_value(QRow row) {
    if (row.empty()) throw std::invalid_argument("max_value: empty row");
    return *std::max_element(row.begin(), row.end());
}

double mean_value(QRow row) {
    if (row.empty()) throw std::invalid_argument("mean_value: empty row");
    double sum = 0.0;
    for (double x : row) sum += x;
    return sum / static_cast<double>(row.size());
}

std::vector<double> softmax_weights(QRow row, double tau) {
    if (tau < 0.0) throw std::invalid_argument("softmax_weights: tau must be >= 0");
    if (row.empty()) throw std::invalid_argument("softmax_weights: empty row");
    const auto m = row.size();
    std::vector<double> w(m);
    if (tau == 0.0) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(m));
        return w;
    }
    // shift by the row max; exponents are <= 0 for any finite row and tau
    const double top = max_value(row);
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        w[i] = std::exp(tau * (row[i] - top));
        z += w[i];
    }
    for (auto& wi : w) wi /= z;
    return w;
}

double softmax_value(QRow row, double tau) {
    const auto w = softmax_weights(row, tau);
    const double top = max_value(row);
    double deficit = 0.0;  // sum_i w_i (max - x_i), each term >= 0
    for (std::size_t i = 0; i < row.size(); ++i) deficit += w[i] * (top - row[i]);
    return top - deficit;
}

double mellowmax_value(QRow row, double omega) {
    if (omega <= 0.0) throw std::invalid_argument("mellowmax_value: omega must be > 0");
    if (row.empty()) throw std::invalid_argument("mellowmax_value: empty row");
    const double top = max_value(row);
    double acc = 0.0;
    for (double x : row) acc += std::exp(omega * (x - top));
    return top + std::log(acc / static_cast<double>(row.size())) / omega;
}

double operator_value(const OperatorSpec& op, QRow row) {
    switch (op.kind) {
        case OperatorKind::Max: return max_value(row);
        case OperatorKind::Mean: return mean_value(row);
        case OperatorKind::Softmax: return softmax_value(row, op.parameter);
        case OperatorKind::Mellowmax: return mellowmax_value(row, op.parameter);
    }
    throw std::logic_error("operator_value: bad kind");
}

double gap(QRow row, double tau) {
    const auto w = softmax_weights(row, tau);
    const double top = max_value(row);
    double g = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) g += w[i] * (top - row[i]);
    return g;
}

double delta_hat(QRow row) {
    if (row.empty()) throw std::invalid_argument("delta_hat: empty row");
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    return *hi - *lo;
}

QTable backup(const TabularMDP& mdp, const OperatorSpec& op, const QTable& q) {
    if (q.n_states != mdp.n_states || q.n_actions != mdp.n_actions)
        throw std::invalid_argument("backup: q/mdp dimension mismatch");
    std::vector<double> v(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s)
        v[s] = operator_value(
            op, QRow(q.row(s), static_cast<std::size_t>(q.n_actions)));
    QTable out(mdp.n_states, mdp.n_actions);
    for (int s = 0; s < mdp.n_states; ++s) {
        for (int a = 0; a < mdp.n_actions; ++a) {
            double exp_v = 0.0;
            for (int s2 = 0; s2 < mdp.n_states; ++s2)
                exp_v += mdp.p(s, a, s2) * v[s2];
            out.at(s, a) = mdp.r(s, a) + mdp.discount * exp_v;
        }
    }
    return out;
}

}  // namespace bellman
