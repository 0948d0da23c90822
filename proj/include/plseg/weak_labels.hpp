#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "plseg/point_cloud.hpp"
#include "plseg/rng.hpp"

namespace plseg {

/// The sparse ground-truth annotation set: indices into the subsampled
/// training cloud plus their class ids. Indices are grouped by class in
/// selection order, so smaller settings are literal prefixes per class.
struct WeakLabelSet {
    std::vector<std::size_t> indices;
    std::vector<ClassId> labels;
    std::size_t per_class_requested = 0;
    std::uint64_t seed = 0;
    std::map<ClassId, std::size_t> per_class_selected;
    std::vector<ClassId> missing_classes;  // classes with zero instances

    std::size_t size() const { return indices.size(); }
};

/// Draws up to `m` labels per class, never more than
/// max(1, floor(cap_fraction * n_c)) for a class with n_c instances (the
/// max(1, .) floor keeps every non-empty class represented; pass
/// min_one_per_class = false for the literal cap). Selection works off a
/// per-class seeded permutation that depends only on (seed, class), so the
/// m1-setting is a prefix of the m2-setting whenever m1 < m2.
inline WeakLabelSet sample_weak_labels(const LabelArray& labels, std::size_t n_classes,
                                       std::size_t m, double cap_fraction, std::uint64_t seed,
                                       bool min_one_per_class = true) {
    if (n_classes == 0) throw std::invalid_argument("sample_weak_labels: need at least one class");
    if (cap_fraction < 0.0 || cap_fraction > 1.0)
        throw std::invalid_argument("sample_weak_labels: cap fraction must be in [0, 1]");

    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const ClassId c = labels[i];
        if (c == kUnlabeled) continue;
        if (c < 0 || static_cast<std::size_t>(c) >= n_classes)
            throw std::out_of_range("sample_weak_labels: label outside class range");
        by_class[static_cast<std::size_t>(c)].push_back(i);
    }

    WeakLabelSet set;
    set.per_class_requested = m;
    set.seed = seed;
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto& pool = by_class[c];
        if (pool.empty()) {
            set.missing_classes.push_back(static_cast<ClassId>(c));
            continue;
        }
        std::size_t cap =
            static_cast<std::size_t>(std::floor(cap_fraction * static_cast<double>(pool.size())));
        if (min_one_per_class) cap = std::max<std::size_t>(cap, 1);
        const std::size_t take = std::min(m, cap);

        // permutation depends on (seed, class) only, never on m
        std::mt19937_64 rng = make_rng(seed, 0x57EA0000ULL + c);
        std::shuffle(pool.begin(), pool.end(), rng);

        set.per_class_selected[static_cast<ClassId>(c)] = take;
        for (std::size_t j = 0; j < take; ++j) {
            set.indices.push_back(pool[j]);
            set.labels.push_back(static_cast<ClassId>(c));
        }
    }
    return set;
}

}  // namespace plseg
