#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "plseg/point_cloud.hpp"

namespace plseg {

/// Output of grid_subsample: one representative point per occupied voxel
/// plus the full-point -> sub-point mapping used for label transfer.
struct SubsampleResult {
    PointCloud sub_cloud;
    LabelArray sub_labels;
    std::vector<std::size_t> parent_of;  // full point index -> sub point index
    double voxel_size = 0.0;
};

namespace detail {

struct VoxelKey {
    std::int64_t i, j, k;
    bool operator==(const VoxelKey& o) const { return i == o.i && j == o.j && k == o.k; }
};

struct VoxelKeyHash {
    std::size_t operator()(const VoxelKey& v) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::uint64_t part : {static_cast<std::uint64_t>(v.i), static_cast<std::uint64_t>(v.j),
                                   static_cast<std::uint64_t>(v.k)}) {
            h ^= part;
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace detail

/// Replaces all points inside each cubic voxel of side `d` by one point at
/// the voxel barycenter (positions and attributes averaged). The grid is
/// anchored at the cloud's axis-aligned minimum corner, so the partition
/// does not depend on global coordinates. The representative label is the
/// majority vote over the member points' non-sentinel labels, ties going
/// to the smallest class id; voxels with only sentinel members stay
/// sentinel. Sub points are emitted in order of first voxel occurrence.
inline SubsampleResult grid_subsample(const PointCloud& cloud, const LabelArray& labels,
                                      double d) {
    if (!(d > 0.0))
        throw std::invalid_argument("grid_subsample: voxel size must be positive");
    if (cloud.empty())
        throw std::invalid_argument("grid_subsample: empty cloud");
    if (labels.size() != cloud.size())
        throw std::invalid_argument("grid_subsample: label count differs from cloud");

    Vec3 lo = cloud.positions[0];
    for (const Vec3& p : cloud.positions) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
    }

    struct Accum {
        Vec3 sum{};
        std::vector<double> attr_sum;
        std::size_t count = 0;
        std::map<ClassId, std::size_t> votes;  // ordered: ties resolve to smallest id
    };

    std::unordered_map<detail::VoxelKey, std::size_t, detail::VoxelKeyHash> slot_of;
    slot_of.reserve(cloud.size());
    std::vector<Accum> voxels;

    SubsampleResult result;
    result.voxel_size = d;
    result.parent_of.resize(cloud.size());

    const std::size_t A = cloud.n_attributes;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.positions[i];
        const detail::VoxelKey key{
            static_cast<std::int64_t>(std::floor((p.x - lo.x) / d)),
            static_cast<std::int64_t>(std::floor((p.y - lo.y) / d)),
            static_cast<std::int64_t>(std::floor((p.z - lo.z) / d))};
        auto [it, inserted] = slot_of.try_emplace(key, voxels.size());
        if (inserted) {
            voxels.emplace_back();
            voxels.back().attr_sum.assign(A, 0.0);
        }
        Accum& v = voxels[it->second];
        v.sum = v.sum + p;
        for (std::size_t a = 0; a < A; ++a) v.attr_sum[a] += cloud.attribute(i, a);
        ++v.count;
        if (labels[i] != kUnlabeled) ++v.votes[labels[i]];
        result.parent_of[i] = it->second;
    }

    result.sub_cloud.n_attributes = A;
    result.sub_cloud.positions.reserve(voxels.size());
    result.sub_labels.reserve(voxels.size());
    std::vector<double> attrs(A);
    for (const Accum& v : voxels) {
        const double inv = 1.0 / static_cast<double>(v.count);
        for (std::size_t a = 0; a < A; ++a) attrs[a] = v.attr_sum[a] * inv;
        result.sub_cloud.push_point({v.sum.x * inv, v.sum.y * inv, v.sum.z * inv}, attrs.data());

        ClassId best = kUnlabeled;
        std::size_t best_count = 0;
        for (const auto& [cls, n] : v.votes) {
            if (n > best_count) {
                best = cls;
                best_count = n;
            }
        }
        result.sub_labels.push_back(best);
    }
    return result;
}

}  // namespace plseg
