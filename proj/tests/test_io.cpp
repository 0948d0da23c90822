#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "plseg/model_io.hpp"
#include "plseg/text_io.hpp"

#include "oracles.hpp"

using Catch::Matchers::ContainsSubstring;
using plseg::kUnlabeled;
using plseg::LabelArray;
using plseg::PointCloud;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("plseg_io_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("fmt_double survives a text round trip exactly") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-300, 300);
    std::vector<double> values = {0.0,    1.0, -1.0, 1.0 / 3.0, 0.1, 1e-300,
                                  1e300, -2.5, 3.141592653589793};
    for (int i = 0; i < 50; ++i) values.push_back(std::ldexp(mant(rng), expo(rng)));
    for (double v : values) {
        const std::string s = plseg::fmt_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("point cloud text round trip is bit-exact") {
    TempDir tmp;
    PointCloud cloud;
    cloud.n_attributes = 2;
    cloud.push_point({1.0 / 3.0, -2.5e-7, 3.141592653589793}, {0.25, 1e-300});
    cloud.push_point({1e17, -0.1, 42.0}, {0.0, -7.5});
    cloud.push_point({-1e-12, 5.0, -3.0}, {0.875, 2.0});
    const LabelArray labels = {2, kUnlabeled, 0};

    const std::string path = tmp.file("cloud.txt");
    plseg::write_pointcloud_text(path, cloud, &labels, {"intensity", "extra"});

    const plseg::TextCloud back = plseg::read_pointcloud_text(path);
    REQUIRE(back.cloud.size() == 3);
    REQUIRE(back.has_labels);
    CHECK(back.labels == labels);
    CHECK(back.attribute_names == std::vector<std::string>{"intensity", "extra"});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.cloud.positions[i].x == cloud.positions[i].x);
        CHECK(back.cloud.positions[i].y == cloud.positions[i].y);
        CHECK(back.cloud.positions[i].z == cloud.positions[i].z);
    }
    CHECK(back.cloud.attributes == cloud.attributes);
}

TEST_CASE("column layouts come from the header or the caller") {
    TempDir tmp;
    const std::string path = tmp.file("layout.txt");

    SECTION("header layout with label alias and skipped column") {
        std::ofstream(path) << "# columns: x y _ z class\n"
                               "1 2 9 3 0\n"
                               "4 5 9 6 -1\n";
        const plseg::TextCloud tc = plseg::read_pointcloud_text(path);
        REQUIRE(tc.cloud.size() == 2);
        CHECK(tc.cloud.n_attributes == 0);
        CHECK(tc.has_labels);
        CHECK(tc.labels == LabelArray{0, kUnlabeled});
        CHECK(tc.cloud.positions[1].z == 6.0);
    }

    SECTION("explicit layout overrides a missing header") {
        std::ofstream(path) << "7 8 9 0.5\n";
        const plseg::TextCloud tc = plseg::read_pointcloud_text(path, "x y z intensity");
        REQUIRE(tc.cloud.size() == 1);
        CHECK(tc.cloud.n_attributes == 1);
        CHECK(tc.attribute_names == std::vector<std::string>{"intensity"});
        CHECK(tc.cloud.attribute(0, 0) == 0.5);
        CHECK_FALSE(tc.has_labels);
    }

    SECTION("missing layout is an error") {
        std::ofstream(path) << "1 2 3\n";
        CHECK_THROWS_WITH(plseg::read_pointcloud_text(path), ContainsSubstring("columns"));
    }

    SECTION("a layout without z is rejected") {
        std::ofstream(path) << "# columns: x y label\n1 2 0\n";
        CHECK_THROWS_WITH(plseg::read_pointcloud_text(path), ContainsSubstring("x, y and z"));
    }
}

TEST_CASE("parse errors carry the file name and line number") {
    TempDir tmp;
    const std::string path = tmp.file("bad.txt");

    SECTION("bad number") {
        std::ofstream(path) << "# columns: x y z\n1 2 3\n1 oops 3\n";
        CHECK_THROWS_WITH(plseg::read_pointcloud_text(path),
                          ContainsSubstring(path + ":3"));
    }

    SECTION("wrong column count") {
        std::ofstream(path) << "# columns: x y z\n1 2\n";
        CHECK_THROWS_WITH(plseg::read_pointcloud_text(path),
                          ContainsSubstring("expected 3 columns"));
    }

    SECTION("missing file") {
        CHECK_THROWS_WITH(plseg::read_pointcloud_text(tmp.file("absent.txt")),
                          ContainsSubstring("cannot open"));
    }
}

TEST_CASE("weak label files round trip including their metadata") {
    TempDir tmp;
    plseg::WeakLabelSet weak;
    weak.indices = {4, 17, 3};
    weak.labels = {0, 2, 1};
    weak.seed = 123456789;
    weak.per_class_requested = 15;

    const std::string path = tmp.file("weak.txt");
    plseg::write_weak_labels(path, weak);
    const plseg::WeakLabelSet back = plseg::read_weak_labels(path);
    CHECK(back.indices == weak.indices);
    CHECK(back.labels == weak.labels);
    CHECK(back.seed == weak.seed);
    CHECK(back.per_class_requested == weak.per_class_requested);
}

TEST_CASE("pseudo snapshot files use the pinned layout") {
    TempDir tmp;
    plseg::PseudoLabelSet set;
    set.indices = {7, 2};
    set.labels = {1, 3};
    set.confidences = {0.875, 0.75};
    set.threshold_used = 0.5;
    set.generation = 4;

    const std::string path = tmp.file("pseudo.csv");
    plseg::write_pseudo_snapshot(path, set);
    CHECK(slurp(path) ==
          "# threshold 0.5\n"
          "generation,point_index,class_id,confidence\n"
          "4,7,1,0.875\n"
          "4,2,3,0.75\n");
}

TEST_CASE("model checkpoints round trip exactly") {
    TempDir tmp;
    plseg::ModelCheckpoint ckpt;
    ckpt.params = plseg::init_params({3, 4, 2}, 99);
    ckpt.params.weights[0](1, 2) = 1.0 / 3.0;  // force a non-terminating decimal
    ckpt.params.biases[1][0] = -2.5e-17;
    ckpt.standardizer.mean = {0.5, -1.25, 3.0};
    ckpt.standardizer.stddev = {1.0, 0.01, 7.5};
    ckpt.voxel_size = 0.4;
    ckpt.feature_k = 32;
    ckpt.scale_radii = {0.5, 1.0, 2.0};
    ckpt.attribute_names = {"intensity"};
    ckpt.n_classes = 2;
    ckpt.class_names = {"ground", "other"};
    ckpt.config_hash = 0xDEADBEEFull;

    const std::string path = tmp.file("model.txt");
    plseg::save_model(path, ckpt);

    std::ifstream head(path);
    std::string first;
    std::getline(head, first);
    CHECK(first == "plseg-model 1");

    const plseg::ModelCheckpoint back = plseg::load_model(path);
    CHECK(oracle::param_values(back.params) == oracle::param_values(ckpt.params));
    CHECK(back.params.layer_sizes == ckpt.params.layer_sizes);
    CHECK(back.standardizer.mean == ckpt.standardizer.mean);
    CHECK(back.standardizer.stddev == ckpt.standardizer.stddev);
    CHECK(back.voxel_size == ckpt.voxel_size);
    CHECK(back.feature_k == ckpt.feature_k);
    CHECK(back.scale_radii == ckpt.scale_radii);
    CHECK(back.attribute_names == ckpt.attribute_names);
    CHECK(back.n_classes == ckpt.n_classes);
    CHECK(back.class_names == ckpt.class_names);
    CHECK(back.config_hash == ckpt.config_hash);
}

TEST_CASE("malformed model files are rejected with context") {
    TempDir tmp;
    const std::string path = tmp.file("model.txt");

    SECTION("wrong magic") {
        std::ofstream(path) << "not-a-model 1\n";
        CHECK_THROWS_WITH(plseg::load_model(path), ContainsSubstring("malformed"));
    }

    SECTION("unsupported version") {
        std::ofstream(path) << "plseg-model 2\n";
        CHECK_THROWS_WITH(plseg::load_model(path), ContainsSubstring("version"));
    }

    SECTION("truncated body") {
        plseg::ModelCheckpoint ckpt;
        ckpt.params = plseg::init_params({2, 2}, 1);
        ckpt.n_classes = 2;
        plseg::save_model(path, ckpt);
        const std::string full = slurp(path);
        std::ofstream(path) << full.substr(0, full.size() / 2);
        CHECK_THROWS_AS(plseg::load_model(path), std::runtime_error);
    }

    SECTION("missing file") {
        CHECK_THROWS_WITH(plseg::load_model(tmp.file("absent.txt")),
                          ContainsSubstring("cannot open"));
    }
}
