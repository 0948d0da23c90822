#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plseg/kv.hpp"
#include "plseg/pseudo_labels.hpp"
#include "plseg/text_io.hpp"
#include "plseg/trainer.hpp"

namespace plseg {

/// Flat key=value experiment description. Paths are resolved relative to
/// the process working directory.
struct ExperimentConfig {
    // data: either a recipe to generate from, or point files to read
    std::string scene_recipe;
    std::uint64_t scene_seed_train = 1;
    std::uint64_t scene_seed_eval = 2;
    std::string train_cloud;
    std::string eval_cloud;
    std::string columns;  // layout for headerless point files
    double voxel_size = 0.4;

    // weak supervision
    std::size_t labels_per_class = 15;
    double cap_fraction = 0.1;
    bool min_one_per_class = true;
    std::string weak_labels_file;  // load instead of sampling when set

    // features
    std::size_t feature_k = 32;
    std::vector<double> scale_radii = {0.8, 1.6, 3.2};

    // model and optimization
    std::vector<std::size_t> hidden = {64, 64};
    std::size_t epochs_stage1 = 100;
    std::size_t epochs_stage2 = 100;
    double alpha = 1.0;
    double convergence_threshold = 0.99;
    double block_radius = 30.0;
    std::size_t batch_blocks = 1;
    std::size_t steps_per_epoch = 0;
    double learning_rate = 0.01;
    double momentum = 0.9;
    double lr_decay = 0.95;
    std::uint64_t seed = 0;
    UpdateStrategy strategy = UpdateStrategy::PL;
    bool carry_velocity = true;
    ThresholdMode threshold_mode = ThresholdMode::MeanAll;
    double fixed_threshold = 0.9;

    // outputs
    std::string run_dir = "run";
    std::size_t checkpoint_every = 0;  // extra checkpoints every N epochs; 0 = stages only

    TrainerConfig trainer() const {
        TrainerConfig t;
        t.epochs_stage1 = epochs_stage1;
        t.epochs_stage2 = epochs_stage2;
        t.alpha = alpha;
        t.convergence_threshold = convergence_threshold;
        t.block_radius = block_radius;
        t.batch_blocks = batch_blocks;
        t.steps_per_epoch = steps_per_epoch;
        t.learning_rate = learning_rate;
        t.momentum = momentum;
        t.lr_decay = lr_decay;
        t.seed = seed;
        t.update_strategy = strategy;
        t.hidden = hidden;
        t.carry_velocity = carry_velocity;
        t.threshold_mode = threshold_mode;
        t.fixed_threshold = fixed_threshold;
        return t;
    }
};

inline UpdateStrategy parse_strategy(const std::string& s) {
    if (s == "pl") return UpdateStrategy::PL;
    if (s == "pl-all") return UpdateStrategy::PL_ALL;
    throw std::runtime_error("strategy must be 'pl' or 'pl-all', got '" + s + "'");
}

inline std::string strategy_name(UpdateStrategy s) {
    return s == UpdateStrategy::PL ? "pl" : "pl-all";
}

inline ThresholdMode parse_threshold_mode(const std::string& s) {
    if (s == "mean-all") return ThresholdMode::MeanAll;
    if (s == "mean-unlabeled") return ThresholdMode::MeanUnlabeled;
    if (s == "fixed") return ThresholdMode::Fixed;
    throw std::runtime_error(
        "threshold_mode must be 'mean-all', 'mean-unlabeled' or 'fixed', got '" + s + "'");
}

inline std::string threshold_mode_name(ThresholdMode m) {
    switch (m) {
        case ThresholdMode::MeanAll: return "mean-all";
        case ThresholdMode::MeanUnlabeled: return "mean-unlabeled";
        case ThresholdMode::Fixed: return "fixed";
    }
    return "mean-all";
}

namespace detail {

struct ConfigKey {
    const char* name;
    const char* fallback;
    const char* help;
};

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"scene_recipe", "", "recipe file; when set, scenes are generated instead of read"},
        {"scene_seed_train", "1", "seed for the generated training scene"},
        {"scene_seed_eval", "2", "seed for the generated held-out scene"},
        {"train_cloud", "", "training point file (ignored when scene_recipe is set)"},
        {"eval_cloud", "", "held-out point file, optional"},
        {"columns", "", "column layout for headerless point files, e.g. 'x y z intensity label'"},
        {"voxel_size", "0.4", "grid subsampling cell size in meters"},
        {"labels_per_class", "15", "weak labels drawn per class"},
        {"cap_fraction", "0.1", "per-class cap as a fraction of class size"},
        {"min_one_per_class", "true", "guarantee at least one label for tiny classes"},
        {"weak_labels_file", "", "load weak labels from file instead of sampling"},
        {"feature_k", "32", "max neighbors per scale"},
        {"scale_radii", "0.8 1.6 3.2", "neighborhood radii in meters, space separated"},
        {"hidden", "64 64", "hidden layer widths, space separated"},
        {"epochs_stage1", "100", "incomplete-supervision epochs"},
        {"epochs_stage2", "100", "pseudo-label-assisted epochs"},
        {"alpha", "1", "weight of the pseudo-label loss term"},
        {"convergence_threshold", "0.99", "min batch accuracy that triggers regeneration"},
        {"block_radius", "30", "training block radius in meters"},
        {"batch_blocks", "1", "blocks concatenated per optimization step"},
        {"steps_per_epoch", "0", "0 = auto: one epoch roughly covers the cloud"},
        {"learning_rate", "0.01", "initial SGD learning rate"},
        {"momentum", "0.9", "SGD momentum"},
        {"lr_decay", "0.95", "per-epoch learning-rate multiplier"},
        {"seed", "0", "master seed for init, sampling and block draws"},
        {"strategy", "pl", "pseudo-label update strategy: pl or pl-all"},
        {"carry_velocity", "true", "keep optimizer momentum across the stage handoff"},
        {"threshold_mode", "mean-all", "mean-all, mean-unlabeled or fixed"},
        {"fixed_threshold", "0.9", "confidence threshold used when threshold_mode=fixed"},
        {"run_dir", "run", "output directory for logs, checkpoints and reports"},
        {"checkpoint_every", "0", "extra checkpoint every N epochs; 0 = stage ends only"},
    };
    return keys;
}

inline std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(parse_double_tok(tok, "key '" + key + "'"));
    return out;
}

inline std::vector<std::size_t> parse_size_list(const std::string& s, const std::string& key) {
    std::vector<std::size_t> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) {
        const long v = parse_int_tok(tok, "key '" + key + "'");
        if (v < 0) throw std::runtime_error("key '" + key + "': negative value");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        bool known = false;
        for (const auto& k : detail::config_keys())
            if (key == k.name) { known = true; break; }
        if (!known) throw std::runtime_error("unknown config key '" + key + "'");
    }
    ExperimentConfig c;
    c.scene_recipe = kv_string(kv, "scene_recipe", c.scene_recipe);
    c.scene_seed_train = static_cast<std::uint64_t>(
        kv_int(kv, "scene_seed_train", static_cast<long long>(c.scene_seed_train)));
    c.scene_seed_eval = static_cast<std::uint64_t>(
        kv_int(kv, "scene_seed_eval", static_cast<long long>(c.scene_seed_eval)));
    c.train_cloud = kv_string(kv, "train_cloud", c.train_cloud);
    c.eval_cloud = kv_string(kv, "eval_cloud", c.eval_cloud);
    c.columns = kv_string(kv, "columns", c.columns);
    c.voxel_size = kv_double(kv, "voxel_size", c.voxel_size);
    c.labels_per_class = static_cast<std::size_t>(
        kv_int(kv, "labels_per_class", static_cast<long long>(c.labels_per_class)));
    c.cap_fraction = kv_double(kv, "cap_fraction", c.cap_fraction);
    c.min_one_per_class = kv_bool(kv, "min_one_per_class", c.min_one_per_class);
    c.weak_labels_file = kv_string(kv, "weak_labels_file", c.weak_labels_file);
    c.feature_k =
        static_cast<std::size_t>(kv_int(kv, "feature_k", static_cast<long long>(c.feature_k)));
    if (auto it = kv.find("scale_radii"); it != kv.end())
        c.scale_radii = detail::parse_double_list(it->second, "scale_radii");
    if (auto it = kv.find("hidden"); it != kv.end())
        c.hidden = detail::parse_size_list(it->second, "hidden");
    c.epochs_stage1 = static_cast<std::size_t>(
        kv_int(kv, "epochs_stage1", static_cast<long long>(c.epochs_stage1)));
    c.epochs_stage2 = static_cast<std::size_t>(
        kv_int(kv, "epochs_stage2", static_cast<long long>(c.epochs_stage2)));
    c.alpha = kv_double(kv, "alpha", c.alpha);
    c.convergence_threshold = kv_double(kv, "convergence_threshold", c.convergence_threshold);
    c.block_radius = kv_double(kv, "block_radius", c.block_radius);
    c.batch_blocks = static_cast<std::size_t>(
        kv_int(kv, "batch_blocks", static_cast<long long>(c.batch_blocks)));
    c.steps_per_epoch = static_cast<std::size_t>(
        kv_int(kv, "steps_per_epoch", static_cast<long long>(c.steps_per_epoch)));
    c.learning_rate = kv_double(kv, "learning_rate", c.learning_rate);
    c.momentum = kv_double(kv, "momentum", c.momentum);
    c.lr_decay = kv_double(kv, "lr_decay", c.lr_decay);
    c.seed = static_cast<std::uint64_t>(kv_int(kv, "seed", static_cast<long long>(c.seed)));
    c.strategy = parse_strategy(kv_string(kv, "strategy", strategy_name(c.strategy)));
    c.carry_velocity = kv_bool(kv, "carry_velocity", c.carry_velocity);
    c.threshold_mode =
        parse_threshold_mode(kv_string(kv, "threshold_mode", threshold_mode_name(c.threshold_mode)));
    c.fixed_threshold = kv_double(kv, "fixed_threshold", c.fixed_threshold);
    c.run_dir = kv_string(kv, "run_dir", c.run_dir);
    c.checkpoint_every = static_cast<std::size_t>(
        kv_int(kv, "checkpoint_every", static_cast<long long>(c.checkpoint_every)));
    return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment_config(read_key_value_file(path));
}

/// Effective configuration in a fixed order; hashed into checkpoints and
/// echoed into the run directory.
inline std::string canonical_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "alpha = " << fmt_double(c.alpha) << '\n';
    out << "batch_blocks = " << c.batch_blocks << '\n';
    out << "block_radius = " << fmt_double(c.block_radius) << '\n';
    out << "cap_fraction = " << fmt_double(c.cap_fraction) << '\n';
    out << "carry_velocity = " << (c.carry_velocity ? "true" : "false") << '\n';
    out << "checkpoint_every = " << c.checkpoint_every << '\n';
    out << "columns = " << c.columns << '\n';
    out << "convergence_threshold = " << fmt_double(c.convergence_threshold) << '\n';
    out << "epochs_stage1 = " << c.epochs_stage1 << '\n';
    out << "epochs_stage2 = " << c.epochs_stage2 << '\n';
    out << "eval_cloud = " << c.eval_cloud << '\n';
    out << "feature_k = " << c.feature_k << '\n';
    out << "fixed_threshold = " << fmt_double(c.fixed_threshold) << '\n';
    out << "hidden =";
    for (std::size_t h : c.hidden) out << ' ' << h;
    out << '\n';
    out << "labels_per_class = " << c.labels_per_class << '\n';
    out << "learning_rate = " << fmt_double(c.learning_rate) << '\n';
    out << "lr_decay = " << fmt_double(c.lr_decay) << '\n';
    out << "min_one_per_class = " << (c.min_one_per_class ? "true" : "false") << '\n';
    out << "momentum = " << fmt_double(c.momentum) << '\n';
    out << "run_dir = " << c.run_dir << '\n';
    out << "scale_radii =";
    for (double r : c.scale_radii) out << ' ' << fmt_double(r);
    out << '\n';
    out << "scene_recipe = " << c.scene_recipe << '\n';
    out << "scene_seed_eval = " << c.scene_seed_eval << '\n';
    out << "scene_seed_train = " << c.scene_seed_train << '\n';
    out << "seed = " << c.seed << '\n';
    out << "steps_per_epoch = " << c.steps_per_epoch << '\n';
    out << "strategy = " << strategy_name(c.strategy) << '\n';
    out << "threshold_mode = " << threshold_mode_name(c.threshold_mode) << '\n';
    out << "train_cloud = " << c.train_cloud << '\n';
    out << "voxel_size = " << fmt_double(c.voxel_size) << '\n';
    out << "weak_labels_file = " << c.weak_labels_file << '\n';
    return out.str();
}

/// FNV-1a over the canonical form.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
    const std::string s = canonical_config(c);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string config_schema() {
    std::ostringstream out;
    out << "# experiment config keys (key = default): description\n";
    for (const auto& k : detail::config_keys()) {
        out << k.name << " = " << (k.fallback[0] ? k.fallback : "(empty)") << "\n    "
            << k.help << '\n';
    }
    return out.str();
}

}  // namespace plseg
