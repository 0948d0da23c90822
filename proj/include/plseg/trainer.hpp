#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "plseg/kdtree.hpp"
#include "plseg/loss.hpp"
#include "plseg/matrix.hpp"
#include "plseg/mlp.hpp"
#include "plseg/point_cloud.hpp"
#include "plseg/pseudo_labels.hpp"
#include "plseg/rng.hpp"
#include "plseg/weak_labels.hpp"

namespace plseg {

/// PL refreshes pseudo-labels when the model converges on the weak labels
/// alone; PL_ALL additionally requires convergence on the pseudo-labels.
enum class UpdateStrategy { PL, PL_ALL };

struct TrainerConfig {
    std::size_t epochs_stage1 = 100;
    std::size_t epochs_stage2 = 100;
    double alpha = 1.0;                   // weight of the pseudo-label loss term
    double convergence_threshold = 0.99;  // strict: min batch accuracy must exceed it
    double block_radius = 30.0;           // meters
    std::size_t batch_blocks = 1;         // blocks concatenated per optimization step
    std::size_t steps_per_epoch = 0;      // 0 = auto: one epoch roughly covers the cloud
    double learning_rate = 0.01;
    double momentum = 0.9;
    double lr_decay = 0.95;  // multiplicative, per epoch, across both stages
    std::uint64_t seed = 0;
    UpdateStrategy update_strategy = UpdateStrategy::PL;
    std::vector<std::size_t> hidden = {64, 64};
    bool carry_velocity = true;  // keep optimizer momentum across the stage handoff
    ThresholdMode threshold_mode = ThresholdMode::MeanAll;
    double fixed_threshold = 0.9;  // used only with ThresholdMode::Fixed

    void validate() const {
        if (alpha < 0.0) throw std::invalid_argument("TrainerConfig: alpha must be >= 0");
        if (!(convergence_threshold > 0.0) || !(convergence_threshold < 1.0))
            throw std::invalid_argument("TrainerConfig: convergence threshold must be in (0, 1)");
        if (!(block_radius > 0.0))
            throw std::invalid_argument("TrainerConfig: block radius must be positive");
        if (batch_blocks == 0)
            throw std::invalid_argument("TrainerConfig: batch_blocks must be >= 1");
        if (!(learning_rate > 0.0))
            throw std::invalid_argument("TrainerConfig: learning rate must be positive");
        if (momentum < 0.0 || momentum >= 1.0)
            throw std::invalid_argument("TrainerConfig: momentum must be in [0, 1)");
        if (!(lr_decay > 0.0) || lr_decay > 1.0)
            throw std::invalid_argument("TrainerConfig: lr decay must be in (0, 1]");
    }
};

/// One row of the per-epoch metrics log.
struct EpochRecord {
    int stage = 1;
    std::size_t epoch = 0;  // global, 1-based, monotone across stages
    bool has_min_acc = false;
    double min_batch_acc = 0.0;
    bool has_train_oa = false;
    double train_oa = 0.0;
    std::size_t pseudo_count = 0;
    bool has_threshold = false;
    double threshold = 0.0;
    double loss_true = 0.0;
    double loss_pseudo = 0.0;
    double lr = 0.0;
    bool regenerated = false;       // pseudo-labels refreshed at the end of this epoch
    std::uint64_t generation = 0;   // pseudo generation in effect during this epoch
};

struct TrainState {
    ModelParams params;
    Gradients velocity;
    std::vector<std::uint32_t> trained_count;
    std::size_t epoch = 0;  // completed global epochs
    std::optional<PseudoLabelSet> pseudo;
    std::mt19937_64 rng;
    std::vector<EpochRecord> log;
    bool stage1_complete = false;
};

/// Inputs shared by both training stages. `features` must already be
/// standardized; `truth` is optional and only feeds the train_OA column.
struct TrainingData {
    const PointCloud& cloud;
    const KdTree& index;
    const Matrix& features;
    const LabelArray* truth = nullptr;
    std::size_t n_classes = 0;
};

struct TrainerHooks {
    /// Called on every pseudo-label refresh; prev is null for the initial set.
    std::function<void(const PseudoLabelSet* prev, const PseudoLabelSet& next)> on_regenerate;
    /// Called after each epoch's record is appended (checkpoint cadence).
    std::function<void(const TrainState& state, int stage)> on_epoch_end;
};

/// Strict convergence test on one epoch's per-batch accuracies.
inline bool epoch_convergence(const std::vector<double>& per_batch_accuracies,
                              double threshold) {
    if (per_batch_accuracies.empty())
        throw std::invalid_argument("epoch_convergence: empty accuracy list");
    return *std::min_element(per_batch_accuracies.begin(), per_batch_accuracies.end()) >
           threshold;
}

struct BlockSample {
    std::size_t center = 0;
    std::vector<std::size_t> members;
};

/// Draws one training block: the center is chosen uniformly among the
/// points trained the fewest times, members are everything within the
/// radius, and every member's counter is incremented.
inline BlockSample sample_training_block(const KdTree& index, const PointCloud& cloud,
                                         std::vector<std::uint32_t>& trained_count,
                                         double radius, std::mt19937_64& rng) {
    if (trained_count.size() != index.size())
        throw std::invalid_argument("sample_training_block: counter size mismatch");
    if (trained_count.empty())
        throw std::invalid_argument("sample_training_block: empty cloud");
    const std::uint32_t min_count =
        *std::min_element(trained_count.begin(), trained_count.end());
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < trained_count.size(); ++i)
        if (trained_count[i] == min_count) candidates.push_back(i);
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);

    BlockSample block;
    block.center = candidates[pick(rng)];
    block.members = index.radius_neighbors(cloud.positions[block.center], radius);
    for (std::size_t i : block.members) ++trained_count[i];
    return block;
}

/// Argmax labels straight from logits (ties to the smallest class id).
inline LabelArray argmax_labels(const Matrix& logits) {
    LabelArray out(logits.rows, kUnlabeled);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        const double* row = logits.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < logits.cols; ++j)
            if (row[j] > row[best]) best = j;
        out[i] = static_cast<ClassId>(best);
    }
    return out;
}

namespace detail {

/// Mean number of block members, probed on fresh counters so the estimate
/// depends only on (data, config, seed).
inline std::size_t auto_steps_per_epoch(const TrainingData& data, const TrainerConfig& cfg) {
    std::mt19937_64 probe_rng = make_rng(cfg.seed, /*stream=*/0xB10C);
    std::vector<std::uint32_t> scratch(data.cloud.size(), 0);
    std::size_t total = 0;
    constexpr std::size_t kProbes = 8;
    for (std::size_t i = 0; i < kProbes; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, scratch.size() - 1);
        const std::size_t center = pick(probe_rng);
        total += data.index.radius_neighbors(data.cloud.positions[center], cfg.block_radius)
                     .size();
    }
    const double mean = static_cast<double>(total) / static_cast<double>(kProbes);
    const double denom = std::max(mean * static_cast<double>(cfg.batch_blocks), 1.0);
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(static_cast<double>(data.cloud.size()) / denom)));
}

struct EpochOutcome {
    std::vector<double> batch_accuracies;
    double loss_true_sum = 0.0;
    std::size_t loss_true_batches = 0;
    double loss_pseudo_sum = 0.0;
    std::size_t loss_pseudo_batches = 0;
};

/// One epoch of block-sampled SGD. Stage 1 passes a null pseudo_target;
/// the loss path is shared so that stage 2 with an empty pseudo set is
/// step-for-step identical to continued incomplete supervision.
inline EpochOutcome run_training_epoch(TrainState& state, const TrainingData& data,
                                       const TrainerConfig& cfg,
                                       const std::vector<ClassId>& weak_target,
                                       const std::vector<ClassId>* pseudo_target,
                                       bool accuracy_includes_pseudo, double lr,
                                       std::size_t steps) {
    EpochOutcome outcome;
    std::vector<std::size_t> members;
    for (std::size_t step = 0; step < steps; ++step) {
        members.clear();
        for (std::size_t b = 0; b < cfg.batch_blocks; ++b) {
            const BlockSample block = sample_training_block(
                data.index, data.cloud, state.trained_count, cfg.block_radius, state.rng);
            members.insert(members.end(), block.members.begin(), block.members.end());
        }
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());

        std::vector<std::size_t> weak_rows, pseudo_rows;
        for (std::size_t i : members) {
            if (weak_target[i] != kUnlabeled)
                weak_rows.push_back(i);
            else if (pseudo_target && (*pseudo_target)[i] != kUnlabeled)
                pseudo_rows.push_back(i);
        }
        if (weak_rows.empty() && pseudo_rows.empty()) continue;

        // gather the batch: weak rows first, then pseudo rows
        const std::size_t nw = weak_rows.size(), np = pseudo_rows.size();
        Matrix batch(nw + np, data.features.cols);
        LabelArray batch_weak(nw + np, kUnlabeled), batch_pseudo(nw + np, kUnlabeled);
        std::vector<std::size_t> weak_mask, pseudo_mask;
        for (std::size_t r = 0; r < nw; ++r) {
            const std::size_t src = weak_rows[r];
            std::copy_n(data.features.row(src), data.features.cols, batch.row(r));
            batch_weak[r] = weak_target[src];
            weak_mask.push_back(r);
        }
        for (std::size_t r = 0; r < np; ++r) {
            const std::size_t src = pseudo_rows[r];
            std::copy_n(data.features.row(src), data.features.cols, batch.row(nw + r));
            batch_pseudo[nw + r] = (*pseudo_target)[src];
            pseudo_mask.push_back(nw + r);
        }

        const Matrix logits = forward(batch, state.params);

        // pre-update training accuracy on this batch
        const std::size_t acc_rows = accuracy_includes_pseudo ? nw + np : nw;
        if (acc_rows > 0) {
            const LabelArray pred = argmax_labels(logits);
            std::size_t correct = 0;
            for (std::size_t r = 0; r < nw; ++r)
                if (pred[r] == batch_weak[r]) ++correct;
            if (accuracy_includes_pseudo)
                for (std::size_t r = nw; r < nw + np; ++r)
                    if (pred[r] == batch_pseudo[r]) ++correct;
            outcome.batch_accuracies.push_back(static_cast<double>(correct) /
                                               static_cast<double>(acc_rows));
        }

        const CombinedLossResult loss = combined_loss(logits, batch_weak, weak_mask,
                                                      batch_pseudo, pseudo_mask, cfg.alpha);
        if (!weak_mask.empty()) {
            outcome.loss_true_sum += loss.loss_true;
            ++outcome.loss_true_batches;
        }
        if (!pseudo_mask.empty()) {
            outcome.loss_pseudo_sum += loss.loss_pseudo;
            ++outcome.loss_pseudo_batches;
        }

        const Gradients grads = loss_gradient(batch, state.params, loss.grad);
        sgd_step(state.params, grads, state.velocity, lr, cfg.momentum);
    }
    return outcome;
}

inline double training_overall_accuracy(const TrainingData& data, const ModelParams& params) {
    const LabelArray pred = argmax_labels(forward(data.features, params));
    std::size_t correct = 0, total = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if ((*data.truth)[i] == kUnlabeled) continue;
        ++total;
        if (pred[i] == (*data.truth)[i]) ++correct;
    }
    return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

inline std::vector<ClassId> targets_from_weak(const WeakLabelSet& weak, std::size_t n) {
    std::vector<ClassId> t(n, kUnlabeled);
    for (std::size_t j = 0; j < weak.indices.size(); ++j) t[weak.indices[j]] = weak.labels[j];
    return t;
}

inline std::vector<ClassId> targets_from_pseudo(const PseudoLabelSet& pseudo, std::size_t n) {
    std::vector<ClassId> t(n, kUnlabeled);
    for (std::size_t j = 0; j < pseudo.indices.size(); ++j)
        t[pseudo.indices[j]] = pseudo.labels[j];
    return t;
}

}  // namespace detail

/// Stage 1, incomplete supervision: block-sampled SGD on the weak-label
/// cross-entropy for epochs_stage1 epochs.
inline TrainState train_incomplete(const TrainingData& data, const WeakLabelSet& weak,
                                   const TrainerConfig& cfg, const TrainerHooks& hooks = {}) {
    cfg.validate();
    if (weak.size() == 0) throw std::invalid_argument("train_incomplete: empty weak-label set");
    if (data.cloud.size() != data.features.rows)
        throw std::invalid_argument("train_incomplete: feature rows differ from cloud size");

    TrainState state;
    std::vector<std::size_t> sizes;
    sizes.push_back(data.features.cols);
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(data.n_classes);
    state.params = init_params(sizes, cfg.seed);
    state.velocity = zero_params(sizes);
    state.trained_count.assign(data.cloud.size(), 0);
    state.rng = make_rng(cfg.seed, /*stream=*/0x7EA1);

    const std::vector<ClassId> weak_target = detail::targets_from_weak(weak, data.cloud.size());
    const std::size_t steps =
        cfg.steps_per_epoch > 0 ? cfg.steps_per_epoch : detail::auto_steps_per_epoch(data, cfg);

    for (std::size_t e = 0; e < cfg.epochs_stage1; ++e) {
        const double lr = cfg.learning_rate * std::pow(cfg.lr_decay, state.epoch);
        const detail::EpochOutcome outcome = detail::run_training_epoch(
            state, data, cfg, weak_target, nullptr, /*accuracy_includes_pseudo=*/false, lr,
            steps);
        ++state.epoch;

        EpochRecord rec;
        rec.stage = 1;
        rec.epoch = state.epoch;
        rec.lr = lr;
        if (!outcome.batch_accuracies.empty()) {
            rec.has_min_acc = true;
            rec.min_batch_acc = *std::min_element(outcome.batch_accuracies.begin(),
                                                  outcome.batch_accuracies.end());
        }
        if (outcome.loss_true_batches > 0)
            rec.loss_true = outcome.loss_true_sum / static_cast<double>(outcome.loss_true_batches);
        if (data.truth) {
            rec.has_train_oa = true;
            rec.train_oa = detail::training_overall_accuracy(data, state.params);
        }
        state.log.push_back(rec);
        if (hooks.on_epoch_end) hooks.on_epoch_end(state, 1);
    }
    state.stage1_complete = true;
    return state;
}

/// Stage 2, pseudo-label assisted learning: starts from the stage-1
/// parameters, immediately generates pseudo-labels, then trains on the
/// combined loss for a fixed budget of epochs_stage2 epochs. At the end of
/// any epoch whose minimum batch accuracy strictly exceeds the convergence
/// threshold the pseudo-labels are regenerated and the previous set is
/// discarded. Convergence counts weak labels only under PL, weak plus
/// pseudo under PL_ALL.
inline TrainState train_pseudo_assisted(TrainState state, const TrainingData& data,
                                        const WeakLabelSet& weak, const TrainerConfig& cfg,
                                        const TrainerHooks& hooks = {}) {
    cfg.validate();
    if (!state.stage1_complete)
        throw std::invalid_argument("train_pseudo_assisted: stage-1 state required");
    if (!state.velocity.layer_sizes.empty() && !cfg.carry_velocity)
        state.velocity = zero_params(state.params.layer_sizes);

    const std::vector<ClassId> weak_target = detail::targets_from_weak(weak, data.cloud.size());
    const std::size_t steps =
        cfg.steps_per_epoch > 0 ? cfg.steps_per_epoch : detail::auto_steps_per_epoch(data, cfg);
    const bool acc_includes_pseudo = cfg.update_strategy == UpdateStrategy::PL_ALL;

    // initial pseudo-labels from the stage-1 model
    PseudoLabelSet next = regenerate(state.params, data.features, weak,
                                     state.pseudo ? state.pseudo->generation : 0,
                                     cfg.threshold_mode, cfg.fixed_threshold);
    if (hooks.on_regenerate) hooks.on_regenerate(state.pseudo ? &*state.pseudo : nullptr, next);
    state.pseudo = std::move(next);
    std::vector<ClassId> pseudo_target =
        detail::targets_from_pseudo(*state.pseudo, data.cloud.size());

    for (std::size_t e = 0; e < cfg.epochs_stage2; ++e) {
        const double lr = cfg.learning_rate * std::pow(cfg.lr_decay, state.epoch);
        const detail::EpochOutcome outcome = detail::run_training_epoch(
            state, data, cfg, weak_target, &pseudo_target, acc_includes_pseudo, lr, steps);
        ++state.epoch;

        EpochRecord rec;
        rec.stage = 2;
        rec.epoch = state.epoch;
        rec.lr = lr;
        rec.pseudo_count = state.pseudo->size();
        rec.has_threshold = true;
        rec.threshold = state.pseudo->threshold_used;
        rec.generation = state.pseudo->generation;
        if (!outcome.batch_accuracies.empty()) {
            rec.has_min_acc = true;
            rec.min_batch_acc = *std::min_element(outcome.batch_accuracies.begin(),
                                                  outcome.batch_accuracies.end());
        }
        if (outcome.loss_true_batches > 0)
            rec.loss_true = outcome.loss_true_sum / static_cast<double>(outcome.loss_true_batches);
        if (outcome.loss_pseudo_batches > 0)
            rec.loss_pseudo =
                outcome.loss_pseudo_sum / static_cast<double>(outcome.loss_pseudo_batches);
        if (data.truth) {
            rec.has_train_oa = true;
            rec.train_oa = detail::training_overall_accuracy(data, state.params);
        }

        if (rec.has_min_acc &&
            epoch_convergence(outcome.batch_accuracies, cfg.convergence_threshold)) {
            PseudoLabelSet refreshed =
                regenerate(state.params, data.features, weak, state.pseudo->generation,
                           cfg.threshold_mode, cfg.fixed_threshold);
            if (hooks.on_regenerate) hooks.on_regenerate(&*state.pseudo, refreshed);
            state.pseudo = std::move(refreshed);  // previous set fully discarded
            pseudo_target = detail::targets_from_pseudo(*state.pseudo, data.cloud.size());
            rec.regenerated = true;
        }
        state.log.push_back(rec);
        if (hooks.on_epoch_end) hooks.on_epoch_end(state, 2);
    }
    return state;
}

}  // namespace plseg
