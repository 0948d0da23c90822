#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "plseg/kdtree.hpp"
#include "plseg/matrix.hpp"
#include "plseg/point_cloud.hpp"

namespace plseg {

/// Symmetric 3x3 matrix in packed form: xx, yy, zz, xy, xz, yz.
struct Sym3 {
    double xx = 0, yy = 0, zz = 0, xy = 0, xz = 0, yz = 0;
};

/// Eigenvalues of a symmetric 3x3 matrix, descending. Closed form via the
/// trigonometric solution of the characteristic cubic.
inline std::array<double, 3> sym3_eigenvalues(const Sym3& m) {
    const double p1 = m.xy * m.xy + m.xz * m.xz + m.yz * m.yz;
    if (p1 == 0.0) {
        std::array<double, 3> ev{m.xx, m.yy, m.zz};
        std::sort(ev.begin(), ev.end(), std::greater<>());
        return ev;
    }
    const double q = (m.xx + m.yy + m.zz) / 3.0;
    const double p2 = (m.xx - q) * (m.xx - q) + (m.yy - q) * (m.yy - q) +
                      (m.zz - q) * (m.zz - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    // B = (M - q I) / p
    const double bxx = (m.xx - q) / p, byy = (m.yy - q) / p, bzz = (m.zz - q) / p;
    const double bxy = m.xy / p, bxz = m.xz / p, byz = m.yz / p;
    const double detb = bxx * (byy * bzz - byz * byz) - bxy * (bxy * bzz - byz * bxz) +
                        bxz * (bxy * byz - byy * bxz);
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double l1 = q + 2.0 * p * std::cos(phi);
    const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    return {l1, 3.0 * q - l1 - l3, l3};
}

namespace detail {

inline std::array<double, 3> cross3(const std::array<double, 3>& a,
                                    const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm3(const std::array<double, 3>& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

}  // namespace detail

/// Unit eigenvector for the smallest eigenvalue (the surface normal of a
/// covariance matrix). Rank-deficient cases fall back to any unit vector
/// orthogonal to the dominant direction, and the fully isotropic case to
/// the z axis; both choices are deterministic.
inline std::array<double, 3> sym3_smallest_eigenvector(const Sym3& m, double lambda_min) {
    const std::array<std::array<double, 3>, 3> rows{{{m.xx - lambda_min, m.xy, m.xz},
                                                     {m.xy, m.yy - lambda_min, m.yz},
                                                     {m.xz, m.yz, m.zz - lambda_min}}};
    // null space of (M - lambda_min I): cross products of row pairs
    std::array<double, 3> best{0, 0, 0};
    double best_norm = 0.0;
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            const auto c = detail::cross3(rows[a], rows[b]);
            const double n = detail::norm3(c);
            if (n > best_norm) {
                best_norm = n;
                best = c;
            }
        }
    }
    const double scale = std::max({std::abs(m.xx), std::abs(m.yy), std::abs(m.zz), 1e-300});
    if (best_norm > 1e-12 * scale) {
        return {best[0] / best_norm, best[1] / best_norm, best[2] / best_norm};
    }
    // repeated smallest eigenvalue: rows are parallel to the dominant
    // direction u; return a unit vector orthogonal to u
    std::array<double, 3> u{0, 0, 0};
    double u_norm = 0.0;
    for (const auto& r : rows) {
        const double n = detail::norm3(r);
        if (n > u_norm) {
            u_norm = n;
            u = r;
        }
    }
    if (u_norm <= 1e-12 * scale) return {0.0, 0.0, 1.0};  // isotropic
    for (double& v : u) v /= u_norm;
    const std::array<double, 3> seed =
        std::abs(u[0]) <= std::abs(u[1]) && std::abs(u[0]) <= std::abs(u[2])
            ? std::array<double, 3>{1, 0, 0}
            : (std::abs(u[1]) <= std::abs(u[2]) ? std::array<double, 3>{0, 1, 0}
                                                : std::array<double, 3>{0, 0, 1});
    auto perp = detail::cross3(u, seed);
    const double n = detail::norm3(perp);
    return {perp[0] / n, perp[1] / n, perp[2] / n};
}

/// Per-point feature rows plus the scales they were computed at.
struct FeatureMatrix {
    Matrix values;  // N x F
    std::vector<double> scale_radii;

    std::size_t feature_count() const { return values.cols; }
};

/// Number of feature columns produced by extract_features.
inline std::size_t feature_width(std::size_t n_scales, std::size_t n_attributes) {
    return 4 * n_scales + 1 + n_attributes;
}

/// Hand-crafted per-point descriptors standing in for a learned encoder.
///
/// For each scale radius r the neighborhood is the point's k nearest
/// neighbors among the points within distance r (the point itself
/// included). The covariance eigenvalues l1 >= l2 >= l3 of that
/// neighborhood give four shape features:
///   linearity (l1-l2)/l1, planarity (l2-l3)/l1, sphericity l3/l1,
///   verticality 1 - |normal . z| with normal the smallest eigenvector.
/// Neighborhoods smaller than 3 points produce zeros for all four.
/// One height channel follows (z minus the minimum z within the largest
/// radius), then the point's raw attribute channels.
inline FeatureMatrix extract_features(const PointCloud& cloud, const KdTree& index,
                                      std::size_t k, const std::vector<double>& scale_radii) {
    if (cloud.empty()) throw std::invalid_argument("extract_features: empty cloud");
    if (k < 3) throw std::invalid_argument("extract_features: k must be at least 3");
    if (scale_radii.empty())
        throw std::invalid_argument("extract_features: need at least one scale radius");
    for (double r : scale_radii)
        if (!(r > 0.0)) throw std::invalid_argument("extract_features: radii must be positive");

    const std::size_t n = cloud.size();
    const std::size_t n_scales = scale_radii.size();
    const double r_max = *std::max_element(scale_radii.begin(), scale_radii.end());

    FeatureMatrix fm;
    fm.scale_radii = scale_radii;
    fm.values = Matrix(n, feature_width(n_scales, cloud.n_attributes));

    std::vector<std::size_t> nb;
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& p = cloud.positions[i];
        double* row = fm.values.row(i);

        const std::vector<std::size_t> in_rmax = index.radius_neighbors(p, r_max);
        double z_min = p.z;
        for (std::size_t j : in_rmax) z_min = std::min(z_min, cloud.positions[j].z);

        for (std::size_t s = 0; s < n_scales; ++s) {
            const double r = scale_radii[s];
            const double r2 = r * r;
            ranked.clear();
            for (std::size_t j : in_rmax) {
                const double d2 = squared_distance(cloud.positions[j], p);
                if (d2 <= r2) ranked.emplace_back(d2, j);
            }
            if (ranked.size() > k)
                std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end());
            const std::size_t count = std::min(ranked.size(), k);

            double lin = 0, pla = 0, sph = 0, vert = 0;
            if (count >= 3) {
                nb.clear();
                for (std::size_t c = 0; c < count; ++c) nb.push_back(ranked[c].second);
                Vec3 mean{};
                for (std::size_t j : nb) mean = mean + cloud.positions[j];
                const double inv = 1.0 / static_cast<double>(nb.size());
                mean = {mean.x * inv, mean.y * inv, mean.z * inv};
                Sym3 cov;
                for (std::size_t j : nb) {
                    const Vec3 d = cloud.positions[j] - mean;
                    cov.xx += d.x * d.x;
                    cov.yy += d.y * d.y;
                    cov.zz += d.z * d.z;
                    cov.xy += d.x * d.y;
                    cov.xz += d.x * d.z;
                    cov.yz += d.y * d.z;
                }
                cov.xx *= inv; cov.yy *= inv; cov.zz *= inv;
                cov.xy *= inv; cov.xz *= inv; cov.yz *= inv;

                auto ev = sym3_eigenvalues(cov);
                for (double& l : ev) l = std::max(l, 0.0);
                if (ev[0] > 0.0) {
                    lin = (ev[0] - ev[1]) / ev[0];
                    pla = (ev[1] - ev[2]) / ev[0];
                    sph = ev[2] / ev[0];
                    const auto normal = sym3_smallest_eigenvector(cov, ev[2]);
                    vert = 1.0 - std::abs(normal[2]);
                }
            }
            row[4 * s + 0] = lin;
            row[4 * s + 1] = pla;
            row[4 * s + 2] = sph;
            row[4 * s + 3] = vert;
        }
        row[4 * n_scales] = p.z - z_min;
        for (std::size_t a = 0; a < cloud.n_attributes; ++a)
            row[4 * n_scales + 1 + a] = cloud.attribute(i, a);
    }
    return fm;
}

/// Per-column z-score statistics fitted on the training features and
/// stored with the model so prediction uses the same scaling.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    static Standardizer fit(const Matrix& features) {
        Standardizer s;
        s.mean.assign(features.cols, 0.0);
        s.stddev.assign(features.cols, 1.0);
        if (features.rows == 0) return s;
        const double inv = 1.0 / static_cast<double>(features.rows);
        for (std::size_t i = 0; i < features.rows; ++i)
            for (std::size_t j = 0; j < features.cols; ++j) s.mean[j] += features(i, j);
        for (double& m : s.mean) m *= inv;
        std::vector<double> var(features.cols, 0.0);
        for (std::size_t i = 0; i < features.rows; ++i)
            for (std::size_t j = 0; j < features.cols; ++j) {
                const double d = features(i, j) - s.mean[j];
                var[j] += d * d;
            }
        for (std::size_t j = 0; j < features.cols; ++j) {
            const double sd = std::sqrt(var[j] * inv);
            s.stddev[j] = sd > 1e-12 ? sd : 1.0;  // constant columns pass through
        }
        return s;
    }

    void apply(Matrix& features) const {
        if (features.cols != mean.size())
            throw std::invalid_argument("Standardizer: feature width mismatch");
        for (std::size_t i = 0; i < features.rows; ++i)
            for (std::size_t j = 0; j < features.cols; ++j)
                features(i, j) = (features(i, j) - mean[j]) / stddev[j];
    }
};

}  // namespace plseg
