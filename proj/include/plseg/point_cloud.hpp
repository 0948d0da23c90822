#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace plseg {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double squared_norm(const Vec3& a) { return dot(a, a); }
inline double squared_distance(const Vec3& a, const Vec3& b) { return squared_norm(a - b); }

using ClassId = std::int32_t;

/// Label value for points without ground truth.
inline constexpr ClassId kUnlabeled = -1;

/// Per-point class ids; kUnlabeled marks missing ground truth.
using LabelArray = std::vector<ClassId>;

/// N points with positions in meters plus optional per-point attribute
/// channels (intensity, color, ...) stored row-major N x n_attributes.
struct PointCloud {
    std::vector<Vec3> positions;
    std::size_t n_attributes = 0;
    std::vector<double> attributes;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }

    double attribute(std::size_t point, std::size_t channel) const {
        return attributes[point * n_attributes + channel];
    }
    double& attribute(std::size_t point, std::size_t channel) {
        return attributes[point * n_attributes + channel];
    }

    void push_point(const Vec3& p, const double* attrs = nullptr) {
        positions.push_back(p);
        for (std::size_t a = 0; a < n_attributes; ++a)
            attributes.push_back(attrs ? attrs[a] : 0.0);
    }

    void push_point(const Vec3& p, const std::vector<double>& attrs) {
        if (attrs.size() != n_attributes)
            throw std::invalid_argument("PointCloud: attribute row has the wrong width");
        push_point(p, attrs.empty() ? nullptr : attrs.data());
    }

    /// Checks the container invariants: finite coordinates and a full
    /// attribute row per point. Throws std::invalid_argument on violation.
    void validate() const {
        if (attributes.size() != positions.size() * n_attributes)
            throw std::invalid_argument("PointCloud: attribute storage size mismatch");
        for (const Vec3& p : positions) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
                throw std::invalid_argument("PointCloud: non-finite coordinate");
        }
        for (double a : attributes) {
            if (!std::isfinite(a))
                throw std::invalid_argument("PointCloud: non-finite attribute");
        }
    }
};

/// Counts labels of each class in [0, n_classes); sentinel entries are skipped.
inline std::vector<std::size_t> class_histogram(const LabelArray& labels, std::size_t n_classes) {
    std::vector<std::size_t> counts(n_classes, 0);
    for (ClassId c : labels) {
        if (c == kUnlabeled) continue;
        if (c < 0 || static_cast<std::size_t>(c) >= n_classes)
            throw std::out_of_range("class_histogram: label outside class range");
        ++counts[static_cast<std::size_t>(c)];
    }
    return counts;
}

}  // namespace plseg
