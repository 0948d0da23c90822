#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "plseg/config.hpp"
#include "plseg/features.hpp"
#include "plseg/kdtree.hpp"
#include "plseg/metrics.hpp"
#include "plseg/model_io.hpp"
#include "plseg/subsample.hpp"
#include "plseg/synthetic.hpp"
#include "plseg/text_io.hpp"
#include "plseg/trainer.hpp"

namespace plseg {

/// One scene taken through the shared preprocessing: grid subsampling,
/// spatial index, raw multi-scale features.
struct PreparedCloud {
    PointCloud full;
    LabelArray full_labels;  // empty when the input carries no labels
    std::vector<std::string> attribute_names;
    SubsampleResult sub;
    std::unique_ptr<KdTree> index;  // over sub.sub_cloud
    Matrix features;                // raw; standardize before use
};

inline PreparedCloud prepare_cloud(PointCloud full, LabelArray labels,
                                   std::vector<std::string> attribute_names, double voxel_size,
                                   std::size_t feature_k,
                                   const std::vector<double>& scale_radii) {
    PreparedCloud out;
    out.full = std::move(full);
    out.full_labels = std::move(labels);
    out.attribute_names = std::move(attribute_names);
    LabelArray sentinel;
    const LabelArray* forwarded = &out.full_labels;
    if (out.full_labels.empty()) {
        sentinel.assign(out.full.size(), kUnlabeled);
        forwarded = &sentinel;
    }
    out.sub = grid_subsample(out.full, *forwarded, voxel_size);
    out.index = std::make_unique<KdTree>(out.sub.sub_cloud);
    out.features =
        extract_features(out.sub.sub_cloud, *out.index, feature_k, scale_radii).values;
    return out;
}

/// Subsampled-model predictions carried back to full resolution.
inline LabelArray predict_full_resolution(const ModelParams& params,
                                          const Standardizer& standardizer,
                                          const PreparedCloud& data) {
    Matrix standardized = data.features;
    standardizer.apply(standardized);
    const LabelArray sub_pred = argmax_labels(forward(standardized, params));
    return nearest_label_transfer(*data.index, data.full, sub_pred);
}

struct StageEvaluation {
    ConfusionMatrix cm;
    double oa = 0.0;
    double macro = 0.0;
    bool macro_defined = false;
};

inline StageEvaluation evaluate_against_truth(const LabelArray& pred, const LabelArray& truth,
                                              std::size_t n_classes) {
    StageEvaluation ev{accumulate_confusion(pred, truth, n_classes), 0.0, 0.0, false};
    ev.oa = overall_accuracy(ev.cm);
    bool any_defined = false;
    for (std::size_t c = 0; c < ev.cm.n_classes; ++c)
        if (class_f1(ev.cm, c).defined) any_defined = true;
    if (any_defined) {
        ev.macro = macro_f1(ev.cm);
        ev.macro_defined = true;
    }
    return ev;
}

namespace detail {

inline std::string utc_timestamp() {
    const std::time_t now =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string epoch_csv_value(bool present, double v) {
    return present ? fmt_metric(v) : std::string();
}

/// Renames every artifact a run managed to write so a crashed run never
/// leaves files that look complete.
struct ArtifactGuard {
    std::vector<std::string> written;

    void add(const std::string& path) { written.push_back(path); }

    void quarantine() {
        namespace fs = std::filesystem;
        for (const std::string& p : written) {
            std::error_code ec;
            if (fs::exists(p, ec)) fs::rename(p, p + ".partial", ec);
        }
    }
};

inline std::vector<std::string> default_class_names(std::size_t n_classes, bool generated) {
    if (generated && n_classes == scene_class_names().size()) return scene_class_names();
    std::vector<std::string> names;
    names.reserve(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) names.push_back("class_" + std::to_string(c));
    return names;
}

}  // namespace detail

/// Everything both training stages consume, derived deterministically from
/// the configuration. Pure: writes no files.
struct PreparedExperiment {
    PreparedCloud train;
    std::unique_ptr<PreparedCloud> eval;  // null when no held-out data
    WeakLabelSet weak;
    Standardizer standardizer;
    Matrix train_features;  // standardized
    std::size_t n_classes = 0;
    std::vector<std::string> class_names;
    bool train_has_truth = false;

    /// Views into this object; keep it alive while training runs.
    TrainingData training_data() const {
        return TrainingData{train.sub.sub_cloud, *train.index, train_features,
                            train_has_truth ? &train.sub.sub_labels : nullptr, n_classes};
    }
};

inline PreparedExperiment prepare_experiment(const ExperimentConfig& cfg,
                                             std::ostream* progress = nullptr) {
    PreparedExperiment prep;

    PointCloud train_full, eval_full;
    LabelArray train_labels, eval_labels;
    std::vector<std::string> attribute_names;
    bool have_eval = false;
    const bool generated = !cfg.scene_recipe.empty();
    if (generated) {
        const SceneRecipe recipe = load_scene_recipe(cfg.scene_recipe);
        SyntheticScene train = generate_synthetic_scene(recipe, cfg.scene_seed_train);
        train_full = std::move(train.cloud);
        train_labels = std::move(train.labels);
        SyntheticScene eval = generate_synthetic_scene(recipe, cfg.scene_seed_eval);
        eval_full = std::move(eval.cloud);
        eval_labels = std::move(eval.labels);
        attribute_names = {"intensity"};
        have_eval = true;
    } else {
        if (cfg.train_cloud.empty())
            throw std::runtime_error("config needs either scene_recipe or train_cloud");
        TextCloud t = read_pointcloud_text(cfg.train_cloud, cfg.columns);
        train_full = std::move(t.cloud);
        attribute_names = t.attribute_names;
        if (t.has_labels) train_labels = std::move(t.labels);
        if (!cfg.eval_cloud.empty()) {
            TextCloud e = read_pointcloud_text(cfg.eval_cloud, cfg.columns);
            if (!e.has_labels) throw std::runtime_error("eval cloud has no label column");
            if (e.cloud.n_attributes != train_full.n_attributes)
                throw std::runtime_error("train and eval attribute counts differ");
            eval_full = std::move(e.cloud);
            eval_labels = std::move(e.labels);
            have_eval = true;
        }
    }

    if (progress) *progress << "train cloud: " << train_full.size() << " points" << std::endl;

    prep.train = prepare_cloud(std::move(train_full), std::move(train_labels), attribute_names,
                               cfg.voxel_size, cfg.feature_k, cfg.scale_radii);
    if (progress)
        *progress << "subsampled: " << prep.train.sub.sub_cloud.size() << " points, "
                  << prep.train.features.cols << " features" << std::endl;
    if (have_eval)
        prep.eval = std::make_unique<PreparedCloud>(
            prepare_cloud(std::move(eval_full), std::move(eval_labels), attribute_names,
                          cfg.voxel_size, cfg.feature_k, cfg.scale_radii));

    // weak labels live on the subsampled training cloud
    std::size_t n_classes = 0;
    if (!cfg.weak_labels_file.empty()) {
        prep.weak = read_weak_labels(cfg.weak_labels_file);
        for (ClassId c : prep.weak.labels)
            n_classes = std::max<std::size_t>(n_classes, static_cast<std::size_t>(c) + 1);
        for (std::size_t idx : prep.weak.indices)
            if (idx >= prep.train.sub.sub_cloud.size())
                throw std::runtime_error("weak-label index out of range for this cloud");
    }
    for (ClassId c : prep.train.sub.sub_labels)
        if (c != kUnlabeled)
            n_classes = std::max<std::size_t>(n_classes, static_cast<std::size_t>(c) + 1);
    if (prep.eval)
        for (ClassId c : prep.eval->full_labels)
            if (c != kUnlabeled)
                n_classes = std::max<std::size_t>(n_classes, static_cast<std::size_t>(c) + 1);
    if (n_classes == 0) throw std::runtime_error("no labels anywhere; cannot train");
    prep.n_classes = n_classes;
    if (cfg.weak_labels_file.empty())
        prep.weak = sample_weak_labels(prep.train.sub.sub_labels, n_classes,
                                       cfg.labels_per_class, cfg.cap_fraction, cfg.seed,
                                       cfg.min_one_per_class);
    if (prep.weak.size() == 0) throw std::runtime_error("weak-label set is empty");

    prep.standardizer = Standardizer::fit(prep.train.features);
    prep.train_features = prep.train.features;
    prep.standardizer.apply(prep.train_features);

    prep.train_has_truth =
        std::any_of(prep.train.sub.sub_labels.begin(), prep.train.sub.sub_labels.end(),
                    [](ClassId c) { return c != kUnlabeled; });
    prep.class_names = detail::default_class_names(n_classes, generated);
    if (progress)
        *progress << "classes: " << n_classes << ", weak labels: " << prep.weak.size()
                  << std::endl;
    return prep;
}

inline ModelCheckpoint make_checkpoint(const ExperimentConfig& cfg,
                                       const PreparedExperiment& prep,
                                       const ModelParams& params) {
    ModelCheckpoint ckpt;
    ckpt.params = params;
    ckpt.standardizer = prep.standardizer;
    ckpt.voxel_size = cfg.voxel_size;
    ckpt.feature_k = cfg.feature_k;
    ckpt.scale_radii = cfg.scale_radii;
    ckpt.attribute_names = prep.train.attribute_names;
    ckpt.n_classes = prep.n_classes;
    ckpt.class_names = prep.class_names;
    ckpt.config_hash = config_hash(cfg);
    return ckpt;
}

/// Serializes the per-epoch log with a fixed column set.
inline void write_epoch_csv(const std::string& path, const std::vector<EpochRecord>& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "stage,epoch,min_batch_acc,train_OA,pseudo_count,threshold,loss_true,loss_pseudo,"
           "lr\n";
    for (const EpochRecord& r : log) {
        out << r.stage << ',' << r.epoch << ','
            << detail::epoch_csv_value(r.has_min_acc, r.min_batch_acc) << ','
            << detail::epoch_csv_value(r.has_train_oa, r.train_oa) << ',' << r.pseudo_count
            << ',' << detail::epoch_csv_value(r.has_threshold, r.threshold) << ','
            << fmt_metric(r.loss_true) << ',' << fmt_metric(r.loss_pseudo) << ','
            << fmt_metric(r.lr) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm,
                                const std::vector<std::string>& class_names) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "truth\\pred";
    for (std::size_t c = 0; c < cm.n_classes; ++c) out << ',' << class_names[c];
    out << '\n';
    for (std::size_t t = 0; t < cm.n_classes; ++t) {
        out << class_names[t];
        for (std::size_t p = 0; p < cm.n_classes; ++p) out << ',' << cm.at(t, p);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Caveat stamped on every evaluation report.
inline const char* kReportNote =
    "desk-scale benchmark on synthetic or reduced data; absolute scores are not comparable "
    "to full-scale published results";

/// Long-format metrics table: one row per (stage, metric, class).
inline void write_metrics_csv(const std::string& path,
                              const std::vector<std::pair<int, const StageEvaluation*>>& stages,
                              const std::vector<std::string>& class_names) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# note: " << kReportNote << '\n';
    out << "stage,metric,class_id,class_name,value\n";
    for (const auto& [stage, ev] : stages) {
        for (std::size_t c = 0; c < ev->cm.n_classes; ++c) {
            const ClassScore s = class_f1(ev->cm, c);
            out << stage << ",precision," << c << ',' << class_names[c] << ','
                << fmt_metric(s.precision) << '\n';
            out << stage << ",recall," << c << ',' << class_names[c] << ','
                << fmt_metric(s.recall) << '\n';
            out << stage << ",f1," << c << ',' << class_names[c] << ','
                << (s.defined ? fmt_metric(s.f1) : "undefined") << '\n';
            out << stage << ",support," << c << ',' << class_names[c] << ','
                << ev->cm.row_sum(c) << '\n';
        }
        out << stage << ",macro_f1,,,"
            << (ev->macro_defined ? fmt_metric(ev->macro) : "undefined") << '\n';
        out << stage << ",overall_accuracy,,," << fmt_metric(ev->oa) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_metrics_json(const std::string& path,
                               const std::vector<std::pair<int, const StageEvaluation*>>& stages,
                               const std::vector<std::string>& class_names) {
    nlohmann::ordered_json root;
    root["note"] = kReportNote;
    for (const auto& [stage, ev] : stages) {
        nlohmann::ordered_json s;
        s["overall_accuracy"] = ev->oa;
        if (ev->macro_defined)
            s["macro_f1"] = ev->macro;
        else
            s["macro_f1"] = nullptr;
        s["classes"] = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < ev->cm.n_classes; ++c) {
            const ClassScore sc = class_f1(ev->cm, c);
            nlohmann::ordered_json jc;
            jc["id"] = c;
            jc["name"] = class_names[c];
            jc["precision"] = sc.precision;
            jc["recall"] = sc.recall;
            if (sc.defined)
                jc["f1"] = sc.f1;
            else
                jc["f1"] = nullptr;
            jc["support"] = ev->cm.row_sum(c);
            s["classes"].push_back(jc);
        }
        s["confusion"] = nlohmann::ordered_json::array();  // rows = truth
        for (std::size_t t = 0; t < ev->cm.n_classes; ++t) {
            nlohmann::ordered_json row = nlohmann::ordered_json::array();
            for (std::size_t p = 0; p < ev->cm.n_classes; ++p) row.push_back(ev->cm.at(t, p));
            s["confusion"].push_back(row);
        }
        root["stage" + std::to_string(stage)] = s;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << root.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_error_map_text(const std::string& path, const std::vector<ErrorFlag>& flags) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# columns: flag\n";
    for (ErrorFlag f : flags) out << static_cast<int>(f) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_config_echo(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# written " << detail::utc_timestamp() << '\n' << canonical_config(cfg);
    if (!out) throw std::runtime_error("write failed: " + path);
}

struct ExperimentResult {
    TrainState state;  // final state after stage 2
    std::size_t n_classes = 0;
    std::vector<std::string> class_names;
    std::uint64_t cfg_hash = 0;
    std::size_t regenerations = 0;
    bool evaluated = false;
    StageEvaluation eval_stage1, eval_stage2;
};

/// Runs the full pipeline described by `cfg`: data preparation, weak-label
/// sampling, both training stages, held-out evaluation after each stage,
/// and all run-directory artifacts. On failure the artifacts written so
/// far are renamed to `<name>.partial` and the exception propagates.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       std::ostream* progress = nullptr) {
    namespace fs = std::filesystem;
    cfg.trainer().validate();
    fs::create_directories(cfg.run_dir);
    detail::ArtifactGuard guard;
    const auto at = [&](const std::string& name) { return cfg.run_dir + "/" + name; };

    try {
        guard.add(at("config_echo.txt"));
        write_config_echo(at("config_echo.txt"), cfg);

        PreparedExperiment prep = prepare_experiment(cfg, progress);
        guard.add(at("weak_labels.txt"));
        write_weak_labels(at("weak_labels.txt"), prep.weak);

        ExperimentResult result;
        result.n_classes = prep.n_classes;
        result.class_names = prep.class_names;
        result.cfg_hash = config_hash(cfg);

        const TrainerConfig tcfg = cfg.trainer();
        const TrainingData data = prep.training_data();

        TrainerHooks hooks;
        hooks.on_regenerate = [&](const PseudoLabelSet*, const PseudoLabelSet& next) {
            ++result.regenerations;
            char name[64];
            std::snprintf(name, sizeof(name), "pseudo_gen%03llu.txt",
                          static_cast<unsigned long long>(next.generation));
            guard.add(at(name));
            write_pseudo_snapshot(at(name), next);
            if (progress)
                *progress << "pseudo generation " << next.generation << ": " << next.size()
                          << " labels, threshold " << fmt_metric(next.threshold_used)
                          << std::endl;
        };
        hooks.on_epoch_end = [&](const TrainState& state, int stage) {
            const EpochRecord& r = state.log.back();
            if (progress && (r.epoch % 10 == 0 || r.epoch == 1))
                *progress << "stage " << stage << " epoch " << r.epoch << " lr "
                          << fmt_metric(r.lr)
                          << (r.has_min_acc ? " min_acc " + fmt_metric(r.min_batch_acc) : "")
                          << (r.has_train_oa ? " train_OA " + fmt_metric(r.train_oa) : "")
                          << std::endl;
            if (cfg.checkpoint_every > 0 && r.epoch % cfg.checkpoint_every == 0) {
                char name[64];
                std::snprintf(name, sizeof(name), "model_epoch%04llu.txt",
                              static_cast<unsigned long long>(r.epoch));
                guard.add(at(name));
                save_model(at(name), make_checkpoint(cfg, prep, state.params));
            }
        };

        // stage 1: incomplete supervision on the weak labels
        TrainState state = train_incomplete(data, prep.weak, tcfg, hooks);
        guard.add(at("model_stage1.txt"));
        save_model(at("model_stage1.txt"), make_checkpoint(cfg, prep, state.params));

        if (prep.eval) {
            const LabelArray pred1 =
                predict_full_resolution(state.params, prep.standardizer, *prep.eval);
            result.eval_stage1 =
                evaluate_against_truth(pred1, prep.eval->full_labels, prep.n_classes);
            if (progress)
                *progress << "stage 1 held-out OA " << fmt_metric(result.eval_stage1.oa)
                          << std::endl;
        }

        // stage 2: pseudo-label-assisted learning
        state = train_pseudo_assisted(std::move(state), data, prep.weak, tcfg, hooks);
        guard.add(at("model_stage2.txt"));
        save_model(at("model_stage2.txt"), make_checkpoint(cfg, prep, state.params));

        guard.add(at("epochs.csv"));
        write_epoch_csv(at("epochs.csv"), state.log);

        if (prep.eval) {
            const LabelArray pred2 =
                predict_full_resolution(state.params, prep.standardizer, *prep.eval);
            result.eval_stage2 =
                evaluate_against_truth(pred2, prep.eval->full_labels, prep.n_classes);
            result.evaluated = true;
            if (progress)
                *progress << "stage 2 held-out OA " << fmt_metric(result.eval_stage2.oa)
                          << std::endl;

            const std::vector<std::pair<int, const StageEvaluation*>> stages = {
                {1, &result.eval_stage1}, {2, &result.eval_stage2}};
            guard.add(at("metrics.csv"));
            write_metrics_csv(at("metrics.csv"), stages, result.class_names);
            guard.add(at("metrics.json"));
            write_metrics_json(at("metrics.json"), stages, result.class_names);
            guard.add(at("confusion_stage1.csv"));
            write_confusion_csv(at("confusion_stage1.csv"), result.eval_stage1.cm,
                                result.class_names);
            guard.add(at("confusion_stage2.csv"));
            write_confusion_csv(at("confusion_stage2.csv"), result.eval_stage2.cm,
                                result.class_names);
            guard.add(at("predictions.txt"));
            write_pointcloud_text(at("predictions.txt"), prep.eval->full, &pred2,
                                  prep.eval->attribute_names);
            guard.add(at("error_map.txt"));
            write_error_map_text(at("error_map.txt"),
                                 error_map(pred2, prep.eval->full_labels));
        }

        guard.add(at("summary.txt"));
        {
            std::ofstream out(at("summary.txt"));
            if (!out) throw std::runtime_error("cannot write " + at("summary.txt"));
            out << "# note: " << kReportNote << '\n';
            out << "points_full " << prep.train.full.size() << '\n';
            out << "points_subsampled " << prep.train.sub.sub_cloud.size() << '\n';
            out << "n_classes " << prep.n_classes << '\n';
            out << "weak_labels " << prep.weak.size() << '\n';
            out << "epochs " << state.log.size() << '\n';
            out << "pseudo_generations " << result.regenerations << '\n';
            if (result.evaluated) {
                out << "stage1_overall_accuracy " << fmt_metric(result.eval_stage1.oa) << '\n';
                out << "stage2_overall_accuracy " << fmt_metric(result.eval_stage2.oa) << '\n';
                out << "improvement "
                    << fmt_metric(result.eval_stage2.oa - result.eval_stage1.oa) << '\n';
            }
        }

        result.state = std::move(state);
        return result;
    } catch (...) {
        guard.quarantine();
        throw;
    }
}

}  // namespace plseg
