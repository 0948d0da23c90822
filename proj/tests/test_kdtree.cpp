#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "plseg/kdtree.hpp"
#include "plseg/point_cloud.hpp"

#include "oracles.hpp"

using plseg::KdTree;
using plseg::PointCloud;
using plseg::Vec3;

namespace {

PointCloud random_cloud(std::size_t n, std::mt19937_64& rng, bool with_duplicates) {
    PointCloud cloud;
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (std::size_t i = 0; i < n; ++i)
        cloud.push_point({dist(rng), dist(rng), dist(rng)});
    if (with_duplicates)
        for (std::size_t i = 0; i + 1 < n; i += 3)
            cloud.positions[i + 1] = cloud.positions[i];
    return cloud;
}

}  // namespace

TEST_CASE("knn matches the exhaustive scan, ties broken by index") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        const PointCloud cloud = random_cloud(n, rng, trial % 2 == 1);
        const KdTree tree(cloud);
        std::uniform_real_distribution<double> dist(-6.0, 6.0);
        for (int q = 0; q < 10; ++q) {
            const Vec3 query{dist(rng), dist(rng), dist(rng)};
            const std::size_t k = 1 + rng() % n;
            CHECK(tree.knn(query, k) == oracle::brute_knn(cloud.positions, query, k));
        }
    }
}

TEST_CASE("knn handles exact-duplicate points deterministically") {
    PointCloud cloud;
    for (int i = 0; i < 5; ++i) cloud.push_point({1.0, 2.0, 3.0});
    cloud.push_point({4.0, 4.0, 4.0});
    const KdTree tree(cloud);
    CHECK(tree.knn({1.0, 2.0, 3.0}, 3) == std::vector<std::size_t>{0, 1, 2});
    CHECK(tree.knn({1.0, 2.0, 3.0}, 6) == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    CHECK(tree.nearest({1.1, 2.0, 3.0}) == 0);
}

TEST_CASE("radius query matches the exhaustive scan and is inclusive") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        const PointCloud cloud = random_cloud(n, rng, trial % 2 == 0);
        const KdTree tree(cloud);
        std::uniform_real_distribution<double> dist(-6.0, 6.0);
        std::uniform_real_distribution<double> rad(0.1, 8.0);
        for (int q = 0; q < 10; ++q) {
            const Vec3 center{dist(rng), dist(rng), dist(rng)};
            const double r = rad(rng);
            CHECK(tree.radius_neighbors(center, r) ==
                  oracle::brute_radius(cloud.positions, center, r));
        }
    }

    // boundary point at exactly distance r is included
    PointCloud cloud;
    cloud.push_point({0, 0, 0});
    cloud.push_point({2, 0, 0});
    const KdTree tree(cloud);
    CHECK(tree.radius_neighbors({0, 0, 0}, 2.0) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("kdtree argument validation") {
    PointCloud empty;
    CHECK_THROWS_AS(KdTree(empty), std::invalid_argument);

    PointCloud one;
    one.push_point({0, 0, 0});
    const KdTree tree(one);
    CHECK_THROWS_AS(tree.knn({0, 0, 0}, 0), std::out_of_range);
    CHECK_THROWS_AS(tree.knn({0, 0, 0}, 2), std::out_of_range);
    CHECK_THROWS_AS(tree.radius_neighbors({0, 0, 0}, 0.0), std::invalid_argument);
}

TEST_CASE("index survives the source cloud being moved away") {
    std::mt19937_64 rng(17);
    PointCloud cloud = random_cloud(50, rng, false);
    const std::vector<Vec3> copy = cloud.positions;
    const KdTree tree(cloud);
    const PointCloud moved = std::move(cloud);
    (void)moved;
    CHECK(tree.knn({0, 0, 0}, 5) == oracle::brute_knn(copy, {0, 0, 0}, 5));
}

TEST_CASE("nearest label transfer assigns each point its closest sub label") {
    PointCloud sub;
    sub.push_point({0, 0, 0});
    sub.push_point({10, 0, 0});
    const KdTree tree(sub);
    PointCloud full;
    full.push_point({1, 0, 0});
    full.push_point({9, 0, 0});
    full.push_point({4, 0, 0});  // closer to sub 0
    const plseg::LabelArray pred = {3, 7};
    CHECK(plseg::nearest_label_transfer(tree, full, pred) == plseg::LabelArray{3, 7, 3});

    CHECK_THROWS_AS(plseg::nearest_label_transfer(tree, full, plseg::LabelArray{3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        plseg::nearest_label_transfer(tree, full, plseg::LabelArray{3, plseg::kUnlabeled}),
        std::invalid_argument);
}
