#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "plseg/features.hpp"
#include "plseg/kdtree.hpp"
#include "plseg/point_cloud.hpp"

#include "oracles.hpp"

using plseg::FeatureMatrix;
using plseg::KdTree;
using plseg::PointCloud;
using plseg::Sym3;

TEST_CASE("closed-form eigenvalues match the Jacobi reference") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        Sym3 m;
        m.xx = dist(rng); m.yy = dist(rng); m.zz = dist(rng);
        m.xy = dist(rng); m.xz = dist(rng); m.yz = dist(rng);
        const auto fast = plseg::sym3_eigenvalues(m);
        const auto ref = oracle::jacobi_eigenvalues(m);
        for (int i = 0; i < 3; ++i)
            CHECK(fast[i] == Catch::Approx(ref[i]).margin(1e-9));
        CHECK(fast[0] >= fast[1]);
        CHECK(fast[1] >= fast[2]);
    }

    // diagonal fast path
    const auto diag = plseg::sym3_eigenvalues({2.0, 5.0, 3.0, 0.0, 0.0, 0.0});
    CHECK(diag[0] == 5.0);
    CHECK(diag[1] == 3.0);
    CHECK(diag[2] == 2.0);
}

TEST_CASE("smallest eigenvector satisfies the eigen equation") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        // build a PSD matrix A^T A so eigenvalues behave like covariances
        double a[3][3];
        for (auto& row : a)
            for (double& v : row) v = dist(rng);
        Sym3 m;
        m.xx = a[0][0]*a[0][0] + a[1][0]*a[1][0] + a[2][0]*a[2][0];
        m.yy = a[0][1]*a[0][1] + a[1][1]*a[1][1] + a[2][1]*a[2][1];
        m.zz = a[0][2]*a[0][2] + a[1][2]*a[1][2] + a[2][2]*a[2][2];
        m.xy = a[0][0]*a[0][1] + a[1][0]*a[1][1] + a[2][0]*a[2][1];
        m.xz = a[0][0]*a[0][2] + a[1][0]*a[1][2] + a[2][0]*a[2][2];
        m.yz = a[0][1]*a[0][2] + a[1][1]*a[1][2] + a[2][1]*a[2][2];

        const auto ev = plseg::sym3_eigenvalues(m);
        const auto v = plseg::sym3_smallest_eigenvector(m, ev[2]);
        const double norm = std::sqrt(v[0]*v[0] + v[1]*v[1] + v[2]*v[2]);
        CHECK(norm == Catch::Approx(1.0).margin(1e-9));

        // |M v - lambda_min v| should vanish relative to the matrix scale
        const double rx = m.xx*v[0] + m.xy*v[1] + m.xz*v[2] - ev[2]*v[0];
        const double ry = m.xy*v[0] + m.yy*v[1] + m.yz*v[2] - ev[2]*v[1];
        const double rz = m.xz*v[0] + m.yz*v[1] + m.zz*v[2] - ev[2]*v[2];
        const double scale = std::max({std::abs(m.xx), std::abs(m.yy), std::abs(m.zz), 1.0});
        CHECK(std::sqrt(rx*rx + ry*ry + rz*rz) / scale < 1e-6);
    }

    // isotropic fallback is the z axis
    const auto iso = plseg::sym3_smallest_eigenvector({1, 1, 1, 0, 0, 0}, 1.0);
    CHECK(iso[0] == 0.0);
    CHECK(iso[1] == 0.0);
    CHECK(iso[2] == 1.0);
}

namespace {

FeatureMatrix features_of(const PointCloud& cloud, std::size_t k,
                          const std::vector<double>& radii) {
    const KdTree tree(cloud);
    return plseg::extract_features(cloud, tree, k, radii);
}

}  // namespace

TEST_CASE("canonical shapes produce the expected dominant descriptor") {
    SECTION("points on a line are linear") {
        PointCloud cloud;
        for (int i = 0; i < 40; ++i) cloud.push_point({i * 0.05, 0.0, 0.0});
        const FeatureMatrix fm = features_of(cloud, 40, {3.0});
        CHECK(fm.values(20, 0) == Catch::Approx(1.0).margin(1e-9));  // linearity
        CHECK(fm.values(20, 1) == Catch::Approx(0.0).margin(1e-9));  // planarity
        CHECK(fm.values(20, 2) == Catch::Approx(0.0).margin(1e-9));  // sphericity
    }

    SECTION("a horizontal grid is perfectly planar with a vertical normal") {
        PointCloud cloud;
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j) cloud.push_point({i * 0.1, j * 0.1, 0.0});
        const FeatureMatrix fm = features_of(cloud, 81, {3.0});
        CHECK(fm.values(0, 0) == Catch::Approx(0.0).margin(1e-9));   // linearity: l1 == l2
        CHECK(fm.values(0, 1) == Catch::Approx(1.0).margin(1e-9));   // planarity
        CHECK(fm.values(0, 3) == Catch::Approx(0.0).margin(1e-9));   // verticality: normal = z
    }

    SECTION("a vertical grid has verticality 1") {
        PointCloud cloud;
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j) cloud.push_point({i * 0.1, 0.0, j * 0.1});
        const FeatureMatrix fm = features_of(cloud, 81, {3.0});
        CHECK(fm.values(0, 1) == Catch::Approx(1.0).margin(1e-9));
        CHECK(fm.values(0, 3) == Catch::Approx(1.0).margin(1e-9));
    }

    SECTION("cube corners are perfectly spherical") {
        PointCloud cloud;
        for (int i = 0; i < 8; ++i)
            cloud.push_point({static_cast<double>(i & 1), static_cast<double>((i >> 1) & 1),
                              static_cast<double>((i >> 2) & 1)});
        const FeatureMatrix fm = features_of(cloud, 8, {5.0});
        CHECK(fm.values(0, 0) == Catch::Approx(0.0).margin(1e-9));
        CHECK(fm.values(0, 1) == Catch::Approx(0.0).margin(1e-9));
        CHECK(fm.values(0, 2) == Catch::Approx(1.0).margin(1e-9));  // sphericity
    }
}

TEST_CASE("sparse neighborhoods yield zero shape features") {
    PointCloud cloud;
    cloud.push_point({0, 0, 0});
    cloud.push_point({0.1, 0, 0});
    cloud.push_point({100, 100, 100});
    const FeatureMatrix fm = features_of(cloud, 3, {1.0});
    // point 2 is alone within radius 1: all four shape features zero
    for (int f = 0; f < 4; ++f) CHECK(fm.values(2, f) == 0.0);
    // points 0 and 1 have only each other: still fewer than 3 neighbors
    for (int f = 0; f < 4; ++f) CHECK(fm.values(0, f) == 0.0);
}

TEST_CASE("height channel is z minus the neighborhood minimum") {
    PointCloud cloud;
    cloud.push_point({0, 0, 0.0});
    cloud.push_point({0, 0, 2.0});
    cloud.push_point({0, 0, 5.0});
    cloud.push_point({50, 0, -10.0});  // outside every r_max neighborhood
    const FeatureMatrix fm = features_of(cloud, 3, {0.8, 6.0});
    const std::size_t h = 4 * 2;  // after two scales of four shape features
    CHECK(fm.values(0, h) == Catch::Approx(0.0));
    CHECK(fm.values(1, h) == Catch::Approx(2.0));
    CHECK(fm.values(2, h) == Catch::Approx(5.0));
    CHECK(fm.values(3, h) == Catch::Approx(0.0));
}

TEST_CASE("attribute channels pass through after the height channel") {
    PointCloud cloud;
    cloud.n_attributes = 2;
    const double a0[] = {0.25, 0.5};
    const double a1[] = {0.75, 1.0};
    cloud.push_point({0, 0, 0}, a0);
    cloud.push_point({1, 0, 0}, a1);
    const FeatureMatrix fm = features_of(cloud, 3, {2.0});
    REQUIRE(fm.feature_count() == plseg::feature_width(1, 2));
    CHECK(fm.values(0, 5) == 0.25);
    CHECK(fm.values(0, 6) == 0.5);
    CHECK(fm.values(1, 5) == 0.75);
    CHECK(fm.values(1, 6) == 1.0);
}

TEST_CASE("feature_width counts 4 per scale plus height plus attributes") {
    CHECK(plseg::feature_width(1, 0) == 5);
    CHECK(plseg::feature_width(3, 1) == 14);
    CHECK(plseg::feature_width(2, 4) == 13);
}

TEST_CASE("neighborhood size is capped at k nearest within the radius") {
    // 10 points in a tight cluster plus the query: with k=4 only the 4
    // nearest participate, so a far-but-within-radius outlier is ignored
    PointCloud line;
    for (int i = 0; i < 6; ++i) line.push_point({i * 0.01, 0, 0});
    line.push_point({0.5, 0.4, 0.0});  // within radius but not among the 4 nearest of point 0
    const KdTree tree(line);
    const FeatureMatrix capped = plseg::extract_features(line, tree, 4, {2.0});
    // with only the 4 nearest collinear points, point 0 stays a perfect line
    CHECK(capped.values(0, 0) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("extract_features argument validation") {
    PointCloud cloud;
    cloud.push_point({0, 0, 0});
    const KdTree tree(cloud);
    CHECK_THROWS_AS(plseg::extract_features(cloud, tree, 2, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(plseg::extract_features(cloud, tree, 3, {}), std::invalid_argument);
    CHECK_THROWS_AS(plseg::extract_features(cloud, tree, 3, {-1.0}), std::invalid_argument);
}

TEST_CASE("standardizer produces zero-mean unit-variance columns") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> dist(-4.0, 9.0);
    plseg::Matrix m(200, 3);
    for (std::size_t i = 0; i < m.rows; ++i) {
        m(i, 0) = dist(rng);
        m(i, 1) = 10.0 * dist(rng) + 100.0;
        m(i, 2) = 7.25;  // constant column
    }
    const plseg::Standardizer s = plseg::Standardizer::fit(m);
    CHECK(s.stddev[2] == 1.0);  // guarded constant column

    plseg::Matrix t = m;
    s.apply(t);
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0.0, var = 0.0;
        for (std::size_t i = 0; i < t.rows; ++i) mean += t(i, j);
        mean /= static_cast<double>(t.rows);
        for (std::size_t i = 0; i < t.rows; ++i) {
            const double d = t(i, j) - mean;
            var += d * d;
        }
        var /= static_cast<double>(t.rows);  // population variance
        CHECK(mean == Catch::Approx(0.0).margin(1e-12));
        CHECK(var == Catch::Approx(1.0).margin(1e-12));
    }
    for (std::size_t i = 0; i < t.rows; ++i)
        CHECK(t(i, 2) == Catch::Approx(0.0).margin(1e-12));

    plseg::Matrix wrong(2, 5);
    CHECK_THROWS_AS(s.apply(wrong), std::invalid_argument);
}
