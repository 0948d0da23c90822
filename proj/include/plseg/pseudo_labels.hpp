#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "plseg/features.hpp"
#include "plseg/matrix.hpp"
#include "plseg/mlp.hpp"
#include "plseg/point_cloud.hpp"
#include "plseg/weak_labels.hpp"

namespace plseg {

/// Model-generated training targets for one generation. Every stored
/// confidence strictly exceeds threshold_used, and the indices never
/// overlap the weak-label set. A regeneration replaces the set wholesale.
struct PseudoLabelSet {
    std::vector<std::size_t> indices;
    std::vector<ClassId> labels;
    std::vector<double> confidences;
    std::uint64_t generation = 0;
    double threshold_used = 0.0;

    std::size_t size() const { return indices.size(); }
};

struct HardenedPredictions {
    LabelArray labels;
    std::vector<double> confidences;
};

/// Argmax per probability row; ties go to the smallest class id. The
/// confidence is the winning probability.
inline HardenedPredictions harden_predictions(const Matrix& probs) {
    if (probs.rows == 0 || probs.cols == 0)
        throw std::invalid_argument("harden_predictions: empty probability matrix");
    HardenedPredictions out;
    out.labels.resize(probs.rows);
    out.confidences.resize(probs.rows);
    for (std::size_t i = 0; i < probs.rows; ++i) {
        const double* row = probs.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < probs.cols; ++j)
            if (row[j] > row[best]) best = j;
        out.labels[i] = static_cast<ClassId>(best);
        out.confidences[i] = row[best];
    }
    return out;
}

/// Mean of the per-point maximum posterior probabilities over all
/// predictions of the training data.
inline double adaptive_threshold(const std::vector<double>& confidences) {
    if (confidences.empty())
        throw std::invalid_argument("adaptive_threshold: empty confidence list");
    double sum = 0.0;
    for (double c : confidences) sum += c;
    return sum / static_cast<double>(confidences.size());
}

/// Keeps exactly the points whose confidence is strictly greater than the
/// threshold, excluding weak-labeled points. An empty result is legal.
inline PseudoLabelSet select_pseudo_labels(const LabelArray& hardened,
                                           const std::vector<double>& confidences,
                                           double threshold, const WeakLabelSet& weak,
                                           std::uint64_t generation) {
    if (hardened.size() != confidences.size())
        throw std::invalid_argument("select_pseudo_labels: label/confidence size mismatch");
    std::vector<bool> is_weak(hardened.size(), false);
    for (std::size_t i : weak.indices)
        if (i < is_weak.size()) is_weak[i] = true;

    PseudoLabelSet set;
    set.generation = generation;
    set.threshold_used = threshold;
    for (std::size_t i = 0; i < hardened.size(); ++i) {
        if (is_weak[i] || !(confidences[i] > threshold)) continue;
        set.indices.push_back(i);
        set.labels.push_back(hardened[i]);
        set.confidences.push_back(confidences[i]);
    }
    return set;
}

enum class ThresholdMode {
    MeanAll,        // average over every training prediction
    MeanUnlabeled,  // average over the non-weak rows only
    Fixed,          // constant threshold (ablation path)
};

/// Full pseudo-label refresh from the current model: forward -> softmax ->
/// harden -> threshold -> select. The returned set replaces any prior set;
/// its generation is prev_generation + 1.
inline PseudoLabelSet regenerate(const ModelParams& params, const Matrix& features,
                                 const WeakLabelSet& weak, std::uint64_t prev_generation,
                                 ThresholdMode mode = ThresholdMode::MeanAll,
                                 double fixed_threshold = 0.0) {
    const Matrix probs = softmax(forward(features, params));
    const HardenedPredictions hard = harden_predictions(probs);

    double threshold = fixed_threshold;
    if (mode == ThresholdMode::MeanAll) {
        threshold = adaptive_threshold(hard.confidences);
    } else if (mode == ThresholdMode::MeanUnlabeled) {
        std::vector<bool> is_weak(hard.confidences.size(), false);
        for (std::size_t i : weak.indices)
            if (i < is_weak.size()) is_weak[i] = true;
        std::vector<double> unlabeled;
        unlabeled.reserve(hard.confidences.size());
        for (std::size_t i = 0; i < hard.confidences.size(); ++i)
            if (!is_weak[i]) unlabeled.push_back(hard.confidences[i]);
        threshold = adaptive_threshold(unlabeled);
    }
    return select_pseudo_labels(hard.labels, hard.confidences, threshold, weak,
                                prev_generation + 1);
}

}  // namespace plseg
