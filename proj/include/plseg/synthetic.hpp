#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "plseg/kv.hpp"
#include "plseg/point_cloud.hpp"
#include "plseg/rng.hpp"

namespace plseg {

/// Class ids used by the generated scenes.
enum SceneClass : ClassId {
    kGround = 0,
    kBuilding = 1,
    kTree = 2,
    kShrub = 3,
    kCar = 4,
    kFence = 5,
};

inline const std::vector<std::string>& scene_class_names() {
    static const std::vector<std::string> names = {"ground", "building", "tree",
                                                   "shrub",  "car",      "fence"};
    return names;
}

/// Layout and density parameters for one synthetic urban scene. Densities
/// are points per square meter of generated surface; counts are exact and
/// derived from them, so randomness affects placement only.
struct SceneRecipe {
    double extent_x = 50.0;
    double extent_y = 50.0;

    double ground_density = 8.0;
    double undulation_amp = 1.2;
    double undulation_period = 35.0;
    double ground_z_noise = 0.04;

    std::size_t n_buildings = 5;
    double building_side_min = 6.0;
    double building_side_max = 12.0;
    double building_height_min = 4.0;
    double building_height_max = 9.0;
    double building_density = 6.0;

    std::size_t n_trees = 30;
    double tree_crown_min = 1.2;
    double tree_crown_max = 2.5;
    double trunk_height_min = 2.0;
    double trunk_height_max = 4.0;
    double canopy_density = 8.0;
    double trunk_density = 6.0;  // points per meter of trunk

    std::size_t n_shrubs = 20;
    double shrub_radius_min = 0.5;
    double shrub_radius_max = 1.2;
    double shrub_density = 10.0;

    std::size_t n_cars = 10;
    double car_density = 10.0;

    std::size_t n_fences = 6;
    double fence_length_min = 8.0;
    double fence_length_max = 20.0;
    double fence_height_min = 1.2;
    double fence_height_max = 2.0;
    double fence_density = 12.0;

    double point_jitter = 0.02;
    double intensity_noise = 0.05;

    void validate() const {
        if (!(extent_x > 0.0) || !(extent_y > 0.0))
            throw std::invalid_argument("SceneRecipe: extents must be positive");
        if (!(ground_density > 0.0))
            throw std::invalid_argument("SceneRecipe: ground density must be positive");
        if (!(undulation_period > 0.0))
            throw std::invalid_argument("SceneRecipe: undulation period must be positive");
    }
};

inline SceneRecipe recipe_from_key_values(const std::map<std::string, std::string>& kv) {
    SceneRecipe r;
    r.extent_x = kv_double(kv, "extent_x", r.extent_x);
    r.extent_y = kv_double(kv, "extent_y", r.extent_y);
    r.ground_density = kv_double(kv, "ground_density", r.ground_density);
    r.undulation_amp = kv_double(kv, "undulation_amp", r.undulation_amp);
    r.undulation_period = kv_double(kv, "undulation_period", r.undulation_period);
    r.ground_z_noise = kv_double(kv, "ground_z_noise", r.ground_z_noise);
    r.n_buildings = static_cast<std::size_t>(kv_int(kv, "n_buildings", static_cast<long long>(r.n_buildings)));
    r.building_side_min = kv_double(kv, "building_side_min", r.building_side_min);
    r.building_side_max = kv_double(kv, "building_side_max", r.building_side_max);
    r.building_height_min = kv_double(kv, "building_height_min", r.building_height_min);
    r.building_height_max = kv_double(kv, "building_height_max", r.building_height_max);
    r.building_density = kv_double(kv, "building_density", r.building_density);
    r.n_trees = static_cast<std::size_t>(kv_int(kv, "n_trees", static_cast<long long>(r.n_trees)));
    r.tree_crown_min = kv_double(kv, "tree_crown_min", r.tree_crown_min);
    r.tree_crown_max = kv_double(kv, "tree_crown_max", r.tree_crown_max);
    r.trunk_height_min = kv_double(kv, "trunk_height_min", r.trunk_height_min);
    r.trunk_height_max = kv_double(kv, "trunk_height_max", r.trunk_height_max);
    r.canopy_density = kv_double(kv, "canopy_density", r.canopy_density);
    r.trunk_density = kv_double(kv, "trunk_density", r.trunk_density);
    r.n_shrubs = static_cast<std::size_t>(kv_int(kv, "n_shrubs", static_cast<long long>(r.n_shrubs)));
    r.shrub_radius_min = kv_double(kv, "shrub_radius_min", r.shrub_radius_min);
    r.shrub_radius_max = kv_double(kv, "shrub_radius_max", r.shrub_radius_max);
    r.shrub_density = kv_double(kv, "shrub_density", r.shrub_density);
    r.n_cars = static_cast<std::size_t>(kv_int(kv, "n_cars", static_cast<long long>(r.n_cars)));
    r.car_density = kv_double(kv, "car_density", r.car_density);
    r.n_fences = static_cast<std::size_t>(kv_int(kv, "n_fences", static_cast<long long>(r.n_fences)));
    r.fence_length_min = kv_double(kv, "fence_length_min", r.fence_length_min);
    r.fence_length_max = kv_double(kv, "fence_length_max", r.fence_length_max);
    r.fence_height_min = kv_double(kv, "fence_height_min", r.fence_height_min);
    r.fence_height_max = kv_double(kv, "fence_height_max", r.fence_height_max);
    r.fence_density = kv_double(kv, "fence_density", r.fence_density);
    r.point_jitter = kv_double(kv, "point_jitter", r.point_jitter);
    r.intensity_noise = kv_double(kv, "intensity_noise", r.intensity_noise);
    r.validate();
    return r;
}

inline SceneRecipe load_scene_recipe(const std::string& path) {
    return recipe_from_key_values(read_key_value_file(path));
}

struct SyntheticScene {
    PointCloud cloud;  // one attribute: intensity in [0, 1]
    LabelArray labels;
    std::size_t n_classes = 6;
};

namespace detail {

inline double terrain_z(const SceneRecipe& r, double x, double y) {
    const double w = 2.0 * 3.14159265358979323846 / r.undulation_period;
    return r.undulation_amp * std::sin(w * x) * std::cos(w * y);
}

inline double class_intensity(ClassId c) {
    switch (c) {
        case kGround: return 0.30;
        case kBuilding: return 0.55;
        case kTree: return 0.70;
        case kShrub: return 0.65;
        case kCar: return 0.85;
        case kFence: return 0.45;
        default: return 0.5;
    }
}

struct SceneBuilder {
    const SceneRecipe& recipe;
    SyntheticScene& scene;
    std::mt19937_64& rng;
    std::normal_distribution<double> jitter{0.0, 1.0};
    std::normal_distribution<double> intensity_n{0.0, 1.0};

    void add(double x, double y, double z, ClassId label, bool jitter_xyz = true) {
        if (jitter_xyz && recipe.point_jitter > 0.0) {
            x += recipe.point_jitter * jitter(rng);
            y += recipe.point_jitter * jitter(rng);
            z += recipe.point_jitter * jitter(rng);
        }
        double intensity =
            class_intensity(label) + recipe.intensity_noise * intensity_n(rng);
        intensity = std::clamp(intensity, 0.0, 1.0);
        scene.cloud.push_point({x, y, z}, {intensity});
        scene.labels.push_back(label);
    }
};

/// Uniform samples on one axis-aligned rectangle, count = round(area * density).
inline void sample_rect(SceneBuilder& b, const Vec3& origin, const Vec3& u, const Vec3& v,
                        double density, ClassId label) {
    const double area = std::sqrt(squared_norm(u)) * std::sqrt(squared_norm(v));
    const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(area * density)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = unit(b.rng), t = unit(b.rng);
        b.add(origin.x + s * u.x + t * v.x, origin.y + s * u.y + t * v.y,
              origin.z + s * u.z + t * v.z, label);
    }
}

/// Uniform-direction samples on an ellipsoid shell with semi-axes (a, b, c).
inline void sample_ellipsoid(SceneBuilder& b, const Vec3& center, double a, double bb, double c,
                             double density, ClassId label) {
    // Thomsen approximation of the ellipsoid surface area
    const double p = 1.6075;
    const double ap = std::pow(a, p), bp = std::pow(bb, p), cp = std::pow(c, p);
    const double area =
        4.0 * 3.14159265358979323846 * std::pow((ap * bp + ap * cp + bp * cp) / 3.0, 1.0 / p);
    const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(area * density)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 d{gauss(b.rng), gauss(b.rng), gauss(b.rng)};
        const double len = std::sqrt(squared_norm(d));
        if (len < 1e-12) {
            d = {0.0, 0.0, 1.0};
        } else {
            d = {d.x / len, d.y / len, d.z / len};
        }
        b.add(center.x + a * d.x, center.y + bb * d.y, center.z + c * d.z, label);
    }
}

/// Roof plus four facades of an axis-aligned box sitting on the terrain.
inline void sample_box(SceneBuilder& b, double cx, double cy, double sx, double sy, double h,
                       double density, ClassId label) {
    const double bz = terrain_z(b.recipe, cx, cy);
    const double x0 = cx - sx / 2, y0 = cy - sy / 2;
    sample_rect(b, {x0, y0, bz + h}, {sx, 0, 0}, {0, sy, 0}, density, label);  // roof
    sample_rect(b, {x0, y0, bz}, {sx, 0, 0}, {0, 0, h}, density, label);
    sample_rect(b, {x0, y0 + sy, bz}, {sx, 0, 0}, {0, 0, h}, density, label);
    sample_rect(b, {x0, y0, bz}, {0, sy, 0}, {0, 0, h}, density, label);
    sample_rect(b, {x0 + sx, y0, bz}, {0, sy, 0}, {0, 0, h}, density, label);
}

}  // namespace detail

/// Generates a deterministic synthetic scene: undulating ground, box
/// buildings, ellipsoid tree crowns with trunks, low shrubs, car-sized
/// boxes, and thin vertical fence sheets. Point counts are exact functions
/// of the recipe; the seed moves only the geometry.
inline SyntheticScene generate_synthetic_scene(const SceneRecipe& recipe, std::uint64_t seed) {
    recipe.validate();
    SyntheticScene scene;
    scene.cloud.n_attributes = 1;
    std::mt19937_64 rng = make_rng(seed, /*stream=*/0x5CE2E);
    detail::SceneBuilder b{recipe, scene, rng};

    std::uniform_real_distribution<double> ux(0.0, recipe.extent_x);
    std::uniform_real_distribution<double> uy(0.0, recipe.extent_y);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gz(0.0, recipe.ground_z_noise);

    const auto ground_n = static_cast<std::size_t>(
        std::llround(recipe.ground_density * recipe.extent_x * recipe.extent_y));
    for (std::size_t i = 0; i < ground_n; ++i) {
        const double x = ux(rng), y = uy(rng);
        b.add(x, y, detail::terrain_z(recipe, x, y) + gz(rng), kGround,
              /*jitter_xyz=*/false);
    }

    auto centered = [&](double margin_x, double margin_y, double& cx, double& cy) {
        const double mx = std::min(margin_x, recipe.extent_x / 2);
        const double my = std::min(margin_y, recipe.extent_y / 2);
        cx = mx + unit(rng) * std::max(recipe.extent_x - 2 * mx, 0.0);
        cy = my + unit(rng) * std::max(recipe.extent_y - 2 * my, 0.0);
    };

    for (std::size_t i = 0; i < recipe.n_buildings; ++i) {
        const double sx = recipe.building_side_min +
                          unit(rng) * (recipe.building_side_max - recipe.building_side_min);
        const double sy = recipe.building_side_min +
                          unit(rng) * (recipe.building_side_max - recipe.building_side_min);
        const double h = recipe.building_height_min +
                         unit(rng) * (recipe.building_height_max - recipe.building_height_min);
        double cx, cy;
        centered(sx / 2 + 1, sy / 2 + 1, cx, cy);
        detail::sample_box(b, cx, cy, sx, sy, h, recipe.building_density, kBuilding);
    }

    for (std::size_t i = 0; i < recipe.n_trees; ++i) {
        const double a =
            recipe.tree_crown_min + unit(rng) * (recipe.tree_crown_max - recipe.tree_crown_min);
        const double c = a * (1.0 + 0.4 * unit(rng));
        const double trunk = recipe.trunk_height_min +
                             unit(rng) * (recipe.trunk_height_max - recipe.trunk_height_min);
        double cx, cy;
        centered(a + 1, a + 1, cx, cy);
        const double bz = detail::terrain_z(recipe, cx, cy);
        detail::sample_ellipsoid(b, {cx, cy, bz + trunk + c}, a, a, c, recipe.canopy_density,
                                 kTree);
        const auto trunk_n = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(trunk * recipe.trunk_density)));
        for (std::size_t j = 0; j < trunk_n; ++j)
            b.add(cx, cy, bz + unit(rng) * trunk, kTree);
    }

    for (std::size_t i = 0; i < recipe.n_shrubs; ++i) {
        const double a = recipe.shrub_radius_min +
                         unit(rng) * (recipe.shrub_radius_max - recipe.shrub_radius_min);
        const double c = a * (0.5 + 0.3 * unit(rng));
        double cx, cy;
        centered(a + 1, a + 1, cx, cy);
        detail::sample_ellipsoid(b, {cx, cy, detail::terrain_z(recipe, cx, cy) + c}, a, a, c,
                                 recipe.shrub_density, kShrub);
    }

    for (std::size_t i = 0; i < recipe.n_cars; ++i) {
        const double sx = 4.2 * (0.9 + 0.2 * unit(rng));
        const double sy = 1.8 * (0.9 + 0.2 * unit(rng));
        const double h = 1.5 * (0.9 + 0.2 * unit(rng));
        double cx, cy;
        centered(sx / 2 + 1, sy / 2 + 1, cx, cy);
        detail::sample_box(b, cx, cy, sx, sy, h, recipe.car_density, kCar);
    }

    for (std::size_t i = 0; i < recipe.n_fences; ++i) {
        const double len = recipe.fence_length_min +
                           unit(rng) * (recipe.fence_length_max - recipe.fence_length_min);
        const double h = recipe.fence_height_min +
                         unit(rng) * (recipe.fence_height_max - recipe.fence_height_min);
        const double angle = unit(rng) * 3.14159265358979323846;
        const double dx = std::cos(angle), dy = std::sin(angle);
        double cx, cy;
        centered(len / 2 + 1, len / 2 + 1, cx, cy);
        const auto n = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(len * h * recipe.fence_density)));
        for (std::size_t j = 0; j < n; ++j) {
            const double s = (unit(rng) - 0.5) * len;
            const double x = cx + s * dx, y = cy + s * dy;
            b.add(x, y, detail::terrain_z(recipe, x, y) + unit(rng) * h, kFence);
        }
    }

    scene.cloud.validate();
    return scene;
}

}  // namespace plseg
