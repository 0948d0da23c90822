#include <random>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "plseg/point_cloud.hpp"
#include "plseg/subsample.hpp"

#include "oracles.hpp"

using plseg::kUnlabeled;
using plseg::LabelArray;
using plseg::PointCloud;
using plseg::SubsampleResult;

namespace {

PointCloud dyadic_cloud(std::size_t n, std::mt19937_64& rng, std::size_t n_attrs) {
    // coordinates on a 1/8 grid: exactly representable, so shifting the
    // whole cloud by multiples of the voxel size cannot move cell borders
    PointCloud cloud;
    cloud.n_attributes = n_attrs;
    std::uniform_int_distribution<int> grid(-64, 64);
    std::uniform_real_distribution<double> attr(0.0, 1.0);
    std::vector<double> attrs(n_attrs);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& a : attrs) a = attr(rng);
        cloud.push_point({grid(rng) / 8.0, grid(rng) / 8.0, grid(rng) / 8.0}, attrs.data());
    }
    return cloud;
}

LabelArray random_labels(std::size_t n, std::mt19937_64& rng, int n_classes) {
    LabelArray labels(n);
    std::uniform_int_distribution<int> pick(-1, n_classes - 1);
    for (auto& l : labels) l = pick(rng);
    return labels;
}

}  // namespace

TEST_CASE("subsample agrees with the voxel-partition reference") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 50 + rng() % 400;
        const PointCloud cloud = dyadic_cloud(n, rng, 2);
        const LabelArray labels = random_labels(n, rng, 4);
        const double d = 0.4;

        const SubsampleResult sub = plseg::grid_subsample(cloud, labels, d);
        const auto cells = oracle::voxel_partition(cloud, d);

        REQUIRE(sub.sub_cloud.size() == cells.size());
        REQUIRE(sub.parent_of.size() == cloud.size());

        for (const auto& [key, members] : cells) {
            // all members map to one sub point
            const std::size_t parent = sub.parent_of[members.front()];
            for (std::size_t i : members) REQUIRE(sub.parent_of[i] == parent);

            // barycenter of positions and mean of attributes
            plseg::Vec3 mean{};
            double a0 = 0, a1 = 0;
            for (std::size_t i : members) {
                mean = mean + cloud.positions[i];
                a0 += cloud.attribute(i, 0);
                a1 += cloud.attribute(i, 1);
            }
            const double inv = 1.0 / static_cast<double>(members.size());
            CHECK(sub.sub_cloud.positions[parent].x == Catch::Approx(mean.x * inv));
            CHECK(sub.sub_cloud.positions[parent].y == Catch::Approx(mean.y * inv));
            CHECK(sub.sub_cloud.positions[parent].z == Catch::Approx(mean.z * inv));
            CHECK(sub.sub_cloud.attribute(parent, 0) == Catch::Approx(a0 * inv));
            CHECK(sub.sub_cloud.attribute(parent, 1) == Catch::Approx(a1 * inv));

            CHECK(sub.sub_labels[parent] == oracle::majority_label(members, labels));
        }

        // distinct voxels map to distinct sub points
        std::set<std::size_t> parents(sub.parent_of.begin(), sub.parent_of.end());
        CHECK(parents.size() == cells.size());
    }
}

TEST_CASE("sub points come out in first-occurrence order") {
    PointCloud cloud;
    cloud.push_point({0, 0, 0});
    cloud.push_point({5, 0, 0});
    cloud.push_point({0.1, 0, 0});  // same voxel as point 0
    cloud.push_point({9, 0, 0});
    const LabelArray labels(4, kUnlabeled);
    const SubsampleResult sub = plseg::grid_subsample(cloud, labels, 1.0);
    REQUIRE(sub.sub_cloud.size() == 3);
    CHECK(sub.parent_of == std::vector<std::size_t>{0, 1, 0, 2});
}

TEST_CASE("label votes within one voxel") {
    PointCloud cloud;
    for (int i = 0; i < 3; ++i) cloud.push_point({0.01 * i, 0, 0});

    SECTION("counts 2-0-1 elect the two-vote class") {
        const SubsampleResult sub = plseg::grid_subsample(cloud, {1, 1, 2}, 1.0);
        REQUIRE(sub.sub_labels.size() == 1);
        CHECK(sub.sub_labels[0] == 1);
    }
    SECTION("ties elect the smallest class id") {
        const SubsampleResult sub = plseg::grid_subsample(cloud, {2, 1, kUnlabeled}, 1.0);
        CHECK(sub.sub_labels[0] == 1);
        const SubsampleResult sub2 = plseg::grid_subsample(cloud, {5, kUnlabeled, 3}, 1.0);
        CHECK(sub2.sub_labels[0] == 3);
    }
    SECTION("sentinels do not vote") {
        const SubsampleResult sub =
            plseg::grid_subsample(cloud, {kUnlabeled, kUnlabeled, 2}, 1.0);
        CHECK(sub.sub_labels[0] == 2);
        const SubsampleResult all_sentinel =
            plseg::grid_subsample(cloud, LabelArray(3, kUnlabeled), 1.0);
        CHECK(all_sentinel.sub_labels[0] == kUnlabeled);
    }
}

TEST_CASE("partition is invariant under whole-cloud translation") {
    std::mt19937_64 rng(29);
    const PointCloud cloud = dyadic_cloud(300, rng, 0);
    const LabelArray labels = random_labels(300, rng, 3);
    const double d = 0.5;  // dyadic voxel size: translated borders stay exact

    const SubsampleResult base = plseg::grid_subsample(cloud, labels, d);

    PointCloud shifted = cloud;
    for (auto& p : shifted.positions) p = p + plseg::Vec3{17.5, -3.0, 201.25};
    const SubsampleResult moved = plseg::grid_subsample(shifted, labels, d);

    // the min-corner anchor makes the partition identical
    REQUIRE(moved.sub_cloud.size() == base.sub_cloud.size());
    CHECK(moved.parent_of == base.parent_of);
    CHECK(moved.sub_labels == base.sub_labels);
}

TEST_CASE("subsample argument validation") {
    PointCloud cloud;
    cloud.push_point({0, 0, 0});
    CHECK_THROWS_AS(plseg::grid_subsample(cloud, {0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(plseg::grid_subsample(cloud, {0, 1}, 1.0), std::invalid_argument);
    const PointCloud empty;
    CHECK_THROWS_AS(plseg::grid_subsample(empty, {}, 1.0), std::invalid_argument);
}
