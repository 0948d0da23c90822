#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "plseg/point_cloud.hpp"

namespace plseg {

/// C x C counts; rows are ground truth, columns are predictions.
struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::uint64_t> counts;

    explicit ConfusionMatrix(std::size_t c = 0) : n_classes(c), counts(c * c, 0) {}

    std::uint64_t& at(std::size_t truth, std::size_t pred) {
        return counts[truth * n_classes + pred];
    }
    std::uint64_t at(std::size_t truth, std::size_t pred) const {
        return counts[truth * n_classes + pred];
    }

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (std::uint64_t c : counts) t += c;
        return t;
    }
    std::uint64_t trace() const {
        std::uint64_t t = 0;
        for (std::size_t c = 0; c < n_classes; ++c) t += at(c, c);
        return t;
    }
    std::uint64_t row_sum(std::size_t truth) const {
        std::uint64_t t = 0;
        for (std::size_t p = 0; p < n_classes; ++p) t += at(truth, p);
        return t;
    }
    std::uint64_t col_sum(std::size_t pred) const {
        std::uint64_t t = 0;
        for (std::size_t r = 0; r < n_classes; ++r) t += at(r, pred);
        return t;
    }

    /// Elementwise merge; accumulation over disjoint ranges is associative.
    ConfusionMatrix& merge(const ConfusionMatrix& other) {
        if (other.n_classes != n_classes)
            throw std::invalid_argument("ConfusionMatrix::merge: class count mismatch");
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
        return *this;
    }
};

/// Counts (truth, prediction) pairs. Points with sentinel ground truth are
/// skipped; a sentinel prediction is an error.
inline ConfusionMatrix accumulate_confusion(const LabelArray& pred, const LabelArray& truth,
                                            std::size_t n_classes) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("accumulate_confusion: length mismatch");
    ConfusionMatrix cm(n_classes);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] == kUnlabeled) continue;
        if (pred[i] == kUnlabeled)
            throw std::invalid_argument("accumulate_confusion: sentinel prediction");
        if (truth[i] < 0 || static_cast<std::size_t>(truth[i]) >= n_classes ||
            pred[i] < 0 || static_cast<std::size_t>(pred[i]) >= n_classes)
            throw std::out_of_range("accumulate_confusion: label outside class range");
        ++cm.at(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(pred[i]));
    }
    return cm;
}

/// Fraction of evaluated points predicted correctly.
inline double overall_accuracy(const ConfusionMatrix& cm) {
    const std::uint64_t total = cm.total();
    if (total == 0) throw std::invalid_argument("overall_accuracy: empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

struct ClassScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool defined = false;  // false when the class never occurs in truth or prediction
};

/// Precision, recall and F1 for one class. Zero-denominator precision or
/// recall is reported as 0; when the class is entirely absent
/// (tp + fp + fn = 0) the score is undefined and excluded from macro
/// averaging.
inline ClassScore class_f1(const ConfusionMatrix& cm, std::size_t c) {
    if (c >= cm.n_classes) throw std::out_of_range("class_f1: class out of range");
    const std::uint64_t tp = cm.at(c, c);
    const std::uint64_t fp = cm.col_sum(c) - tp;
    const std::uint64_t fn = cm.row_sum(c) - tp;
    ClassScore s;
    if (tp + fp + fn == 0) return s;
    s.defined = true;
    s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    s.f1 = s.precision + s.recall > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

/// Arithmetic mean of the defined per-class F1 scores.
inline double macro_f1(const ConfusionMatrix& cm) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t c = 0; c < cm.n_classes; ++c) {
        const ClassScore s = class_f1(cm, c);
        if (s.defined) {
            sum += s.f1;
            ++defined;
        }
    }
    if (defined == 0) throw std::invalid_argument("macro_f1: no class has a defined F1");
    return sum / static_cast<double>(defined);
}

enum class ErrorFlag : std::int8_t { Unlabeled = -1, Incorrect = 0, Correct = 1 };

/// Per-point correctness flags for error-map exports.
inline std::vector<ErrorFlag> error_map(const LabelArray& pred, const LabelArray& truth) {
    if (pred.size() != truth.size()) throw std::invalid_argument("error_map: length mismatch");
    std::vector<ErrorFlag> flags(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] == kUnlabeled)
            flags[i] = ErrorFlag::Unlabeled;
        else
            flags[i] = pred[i] == truth[i] ? ErrorFlag::Correct : ErrorFlag::Incorrect;
    }
    return flags;
}

}  // namespace plseg
