#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "plseg/matrix.hpp"
#include "plseg/point_cloud.hpp"

namespace plseg {

struct LossResult {
    double loss = 0.0;
    Matrix grad;  // same shape as the logits
};

/// Softmax cross-entropy averaged over the masked rows, with the gradient
/// at the logits: (p - onehot) / |mask| inside the mask, zero outside.
/// Computed through a max-shifted log-softmax. An empty mask yields loss 0
/// and a zero gradient.
inline LossResult masked_cross_entropy(const Matrix& logits, const LabelArray& targets,
                                       const std::vector<std::size_t>& mask) {
    if (targets.size() != logits.rows)
        throw std::invalid_argument("masked_cross_entropy: target count differs from logits");
    LossResult out;
    out.grad = Matrix(logits.rows, logits.cols);
    if (mask.empty()) return out;

    const double inv_m = 1.0 / static_cast<double>(mask.size());
    double loss = 0.0;
    for (std::size_t i : mask) {
        if (i >= logits.rows)
            throw std::out_of_range("masked_cross_entropy: mask index out of range");
        const ClassId t = targets[i];
        if (t == kUnlabeled || t < 0 || static_cast<std::size_t>(t) >= logits.cols)
            throw std::invalid_argument("masked_cross_entropy: masked row lacks a valid target");

        const double* row = logits.row(i);
        double m = row[0];
        for (std::size_t j = 1; j < logits.cols; ++j) m = std::max(m, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols; ++j) sum += std::exp(row[j] - m);
        const double log_sum = m + std::log(sum);
        loss -= row[static_cast<std::size_t>(t)] - log_sum;

        double* g = out.grad.row(i);
        for (std::size_t j = 0; j < logits.cols; ++j)
            g[j] = std::exp(row[j] - log_sum) * inv_m;
        g[static_cast<std::size_t>(t)] -= inv_m;
    }
    out.loss = loss * inv_m;
    return out;
}

struct CombinedLossResult {
    double loss = 0.0;
    double loss_true = 0.0;
    double loss_pseudo = 0.0;
    Matrix grad;
};

/// Total training loss: the ground-truth term plus alpha times the
/// pseudo-label term, each averaged over its own mask. The masks must be
/// disjoint.
inline CombinedLossResult combined_loss(const Matrix& logits, const LabelArray& weak_targets,
                                        const std::vector<std::size_t>& weak_mask,
                                        const LabelArray& pseudo_targets,
                                        const std::vector<std::size_t>& pseudo_mask,
                                        double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("combined_loss: alpha must be non-negative");
    std::vector<bool> seen(logits.rows, false);
    for (std::size_t i : weak_mask) {
        if (i >= logits.rows) throw std::out_of_range("combined_loss: weak mask out of range");
        seen[i] = true;
    }
    for (std::size_t i : pseudo_mask) {
        if (i >= logits.rows) throw std::out_of_range("combined_loss: pseudo mask out of range");
        if (seen[i]) throw std::invalid_argument("combined_loss: masks overlap");
    }

    const LossResult lt = masked_cross_entropy(logits, weak_targets, weak_mask);
    const LossResult lp = masked_cross_entropy(logits, pseudo_targets, pseudo_mask);

    CombinedLossResult out;
    out.loss_true = lt.loss;
    out.loss_pseudo = lp.loss;
    out.loss = lt.loss + alpha * lp.loss;
    out.grad = lt.grad;
    for (std::size_t i = 0; i < out.grad.data.size(); ++i)
        out.grad.data[i] += alpha * lp.grad.data[i];
    return out;
}

}  // namespace plseg
