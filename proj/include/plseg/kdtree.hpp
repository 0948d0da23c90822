#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "plseg/point_cloud.hpp"

namespace plseg {

/// Static kd-tree over a point cloud's positions. Queries are exact:
/// knn returns the k nearest points ascending by distance with ties broken
/// by smaller point index, radius_neighbors returns every point within the
/// (inclusive) radius sorted by point index. Immutable after construction,
/// so concurrent queries are safe.
class KdTree {
public:
    explicit KdTree(const PointCloud& cloud) : points_(cloud.positions) {
        if (points_.empty())
            throw std::invalid_argument("KdTree: cannot index an empty cloud");
        order_.resize(points_.size());
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<std::uint32_t>(i);
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        root_ = build(0, static_cast<std::uint32_t>(points_.size()));
    }

    std::size_t size() const { return points_.size(); }

    /// k nearest neighbors of `query`, ascending by distance; equal
    /// distances ordered by point index. 1 <= k <= size().
    std::vector<std::size_t> knn(const Vec3& query, std::size_t k) const {
        if (k < 1 || k > points_.size())
            throw std::out_of_range("KdTree::knn: k out of range");
        std::vector<Cand> heap;
        heap.reserve(k);
        search_knn(root_, query, k, heap);
        std::sort(heap.begin(), heap.end());
        std::vector<std::size_t> out(heap.size());
        for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].index;
        return out;
    }

    std::size_t nearest(const Vec3& query) const { return knn(query, 1)[0]; }

    /// All points with distance <= r from `center`, sorted by point index.
    std::vector<std::size_t> radius_neighbors(const Vec3& center, double r) const {
        if (!(r > 0.0))
            throw std::invalid_argument("KdTree::radius_neighbors: radius must be positive");
        std::vector<std::size_t> out;
        search_radius(root_, center, r * r, out);
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static constexpr std::uint32_t kLeafSize = 16;
    static constexpr std::uint32_t kNoChild = std::numeric_limits<std::uint32_t>::max();

    struct Node {
        double split = 0.0;
        std::uint32_t left = kNoChild, right = kNoChild;
        std::uint32_t begin = 0, end = 0;  // leaf range into order_
        std::int8_t axis = -1;             // -1 marks a leaf
    };

    struct Cand {
        double d2;
        std::size_t index;
        // "closer first" ordering; the max-heap top is the current worst
        bool operator<(const Cand& o) const {
            return d2 < o.d2 || (d2 == o.d2 && index < o.index);
        }
    };

    std::vector<Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
    std::uint32_t root_ = 0;

    std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
        const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        if (end - begin <= kLeafSize) {
            nodes_[id].begin = begin;
            nodes_[id].end = end;
            return id;
        }
        // split along the axis with the largest extent
        Vec3 lo = points_[order_[begin]], hi = lo;
        for (std::uint32_t i = begin + 1; i < end; ++i) {
            const Vec3& p = points_[order_[i]];
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
        int axis = 0;
        double extent = hi.x - lo.x;
        if (hi.y - lo.y > extent) { axis = 1; extent = hi.y - lo.y; }
        if (hi.z - lo.z > extent) { axis = 2; extent = hi.z - lo.z; }

        const std::uint32_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             const double ca = points_[a][axis], cb = points_[b][axis];
                             return ca < cb || (ca == cb && a < b);
                         });
        const double split = points_[order_[mid]][axis];

        const std::uint32_t left = build(begin, mid);
        const std::uint32_t right = build(mid, end);
        Node& n = nodes_[id];
        n.axis = static_cast<std::int8_t>(axis);
        n.split = split;
        n.left = left;
        n.right = right;
        return id;
    }

    void consider(const Vec3& query, std::size_t k, std::size_t index,
                  std::vector<Cand>& heap) const {
        const Cand c{squared_distance(points_[index], query), index};
        if (heap.size() < k) {
            heap.push_back(c);
            std::push_heap(heap.begin(), heap.end());
        } else if (c < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = c;
            std::push_heap(heap.begin(), heap.end());
        }
    }

    void search_knn(std::uint32_t id, const Vec3& query, std::size_t k,
                    std::vector<Cand>& heap) const {
        const Node& n = nodes_[id];
        if (n.axis < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i)
                consider(query, k, order_[i], heap);
            return;
        }
        const double delta = query[n.axis] - n.split;
        const std::uint32_t near = delta < 0.0 ? n.left : n.right;
        const std::uint32_t far = delta < 0.0 ? n.right : n.left;
        search_knn(near, query, k, heap);
        // the far side can still hold equal-distance points with smaller
        // indices, so prune only on strict excess
        if (heap.size() < k || delta * delta <= heap.front().d2)
            search_knn(far, query, k, heap);
    }

    void search_radius(std::uint32_t id, const Vec3& center, double r2,
                       std::vector<std::size_t>& out) const {
        const Node& n = nodes_[id];
        if (n.axis < 0) {
            for (std::uint32_t i = n.begin; i < n.end; ++i) {
                const std::size_t idx = order_[i];
                if (squared_distance(points_[idx], center) <= r2) out.push_back(idx);
            }
            return;
        }
        const double delta = center[n.axis] - n.split;
        const std::uint32_t near = delta < 0.0 ? n.left : n.right;
        const std::uint32_t far = delta < 0.0 ? n.right : n.left;
        search_radius(near, center, r2, out);
        if (delta * delta <= r2) search_radius(far, center, r2, out);
    }
};

/// Assigns each full-resolution point the predicted label of its nearest
/// subsampled point. `sub_predictions` must be fully labeled.
inline LabelArray nearest_label_transfer(const KdTree& sub_index, const PointCloud& full_cloud,
                                         const LabelArray& sub_predictions) {
    if (sub_predictions.size() != sub_index.size())
        throw std::invalid_argument("nearest_label_transfer: prediction count differs from index");
    for (ClassId c : sub_predictions)
        if (c == kUnlabeled)
            throw std::invalid_argument("nearest_label_transfer: predictions contain sentinel");
    LabelArray out(full_cloud.size(), kUnlabeled);
    for (std::size_t i = 0; i < full_cloud.size(); ++i)
        out[i] = sub_predictions[sub_index.nearest(full_cloud.positions[i])];
    return out;
}

}  // namespace plseg
