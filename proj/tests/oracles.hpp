#pragma once

// Independent reference implementations the tests compare the library
// against. Everything here is deliberately naive: exhaustive scans,
// iterative eigensolvers, finite differences.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "plseg/features.hpp"
#include "plseg/mlp.hpp"
#include "plseg/point_cloud.hpp"

namespace oracle {

inline std::vector<std::size_t> brute_knn(const std::vector<plseg::Vec3>& pts,
                                          const plseg::Vec3& q, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        ranked.emplace_back(plseg::squared_distance(pts[i], q), i);
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k && i < ranked.size(); ++i) out.push_back(ranked[i].second);
    return out;
}

inline std::vector<std::size_t> brute_radius(const std::vector<plseg::Vec3>& pts,
                                             const plseg::Vec3& center, double r) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (plseg::squared_distance(pts[i], center) <= r * r) out.push_back(i);
    return out;
}

/// Cyclic Jacobi rotations; descending eigenvalues.
inline std::array<double, 3> jacobi_eigenvalues(const plseg::Sym3& m) {
    double a[3][3] = {{m.xx, m.xy, m.xz}, {m.xy, m.yy, m.yz}, {m.xz, m.yz, m.zz}};
    double frob2 = 0.0;
    for (auto& row : a)
        for (double v : row) frob2 += v * v;
    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off =
            a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if (off <= 1e-30 * std::max(frob2, 1e-300)) break;
        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double app = a[p][p], aqq = a[q][q], apq = a[p][q];
                a[p][p] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
                a[q][q] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
                a[p][q] = a[q][p] = 0.0;
                const int r = 3 - p - q;
                const double apr = a[p][r], aqr = a[q][r];
                a[p][r] = a[r][p] = c * apr - s * aqr;
                a[q][r] = a[r][q] = s * apr + c * aqr;
            }
        }
    }
    std::array<double, 3> ev{a[0][0], a[1][1], a[2][2]};
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

inline std::vector<double> param_values(const plseg::ModelParams& p) {
    std::vector<double> out;
    for (const auto& w : p.weights) out.insert(out.end(), w.data.begin(), w.data.end());
    for (const auto& b : p.biases) out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline std::vector<double*> param_entries(plseg::ModelParams& p) {
    std::vector<double*> out;
    for (auto& w : p.weights)
        for (double& x : w.data) out.push_back(&x);
    for (auto& b : p.biases)
        for (double& x : b) out.push_back(&x);
    return out;
}

/// Central finite differences of a scalar function over every parameter.
inline plseg::Gradients fd_gradient(const std::function<double(const plseg::ModelParams&)>& f,
                                    const plseg::ModelParams& at, double h = 1e-5) {
    plseg::Gradients g = plseg::zero_params(at.layer_sizes);
    plseg::ModelParams x = at;
    const std::vector<double*> xs = param_entries(x);
    const std::vector<double*> gs = param_entries(g);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double orig = *xs[i];
        *xs[i] = orig + h;
        const double fp = f(x);
        *xs[i] = orig - h;
        const double fm = f(x);
        *xs[i] = orig;
        *gs[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline double max_rel_err(const plseg::ModelParams& a, const plseg::ModelParams& b) {
    const std::vector<double> va = param_values(a), vb = param_values(b);
    double worst = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, rel_err(va[i], vb[i]));
    return worst;
}

using VoxelKey = std::array<long long, 3>;

/// Partition of the cloud into voxel member lists, keyed by floor indices
/// off the axis-aligned minimum corner.
inline std::map<VoxelKey, std::vector<std::size_t>> voxel_partition(
    const plseg::PointCloud& cloud, double d) {
    plseg::Vec3 lo = cloud.positions[0];
    for (const plseg::Vec3& p : cloud.positions) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
    }
    std::map<VoxelKey, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const plseg::Vec3& p = cloud.positions[i];
        cells[{static_cast<long long>(std::floor((p.x - lo.x) / d)),
               static_cast<long long>(std::floor((p.y - lo.y) / d)),
               static_cast<long long>(std::floor((p.z - lo.z) / d))}]
            .push_back(i);
    }
    return cells;
}

/// Majority label over a member list, sentinel entries excluded, ties to
/// the smallest class id; all-sentinel lists stay sentinel.
inline plseg::ClassId majority_label(const std::vector<std::size_t>& members,
                                     const plseg::LabelArray& labels) {
    std::map<plseg::ClassId, std::size_t> votes;
    for (std::size_t i : members)
        if (labels[i] != plseg::kUnlabeled) ++votes[labels[i]];
    plseg::ClassId best = plseg::kUnlabeled;
    std::size_t best_count = 0;
    for (const auto& [cls, n] : votes)
        if (n > best_count) {
            best = cls;
            best_count = n;
        }
    return best;
}

/// SGD-with-momentum reference via the closed form
/// v_t = sum_{s<=t} mu^(t-s) g_s, applied to a gradient history.
inline plseg::ModelParams momentum_reference(const plseg::ModelParams& p0,
                                             const std::vector<plseg::Gradients>& history,
                                             const std::vector<double>& lrs, double mu) {
    std::vector<double> p = param_values(p0);
    std::vector<std::vector<double>> g;
    g.reserve(history.size());
    for (const auto& h : history) g.push_back(param_values(h));
    for (std::size_t t = 0; t < g.size(); ++t) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            double v = 0.0;
            for (std::size_t s = 0; s <= t; ++s)
                v += std::pow(mu, static_cast<double>(t - s)) * g[s][i];
            p[i] -= lrs[t] * v;
        }
    }
    plseg::ModelParams out = p0;
    const std::vector<double*> entries = param_entries(out);
    for (std::size_t i = 0; i < entries.size(); ++i) *entries[i] = p[i];
    return out;
}

}  // namespace oracle
