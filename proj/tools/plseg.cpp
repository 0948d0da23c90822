#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "plseg/plseg.hpp"

namespace {

plseg::TextCloud read_labeled(const std::string& path, const std::string& columns) {
    plseg::TextCloud t = plseg::read_pointcloud_text(path, columns);
    if (!t.has_labels) throw std::runtime_error(path + ": a label column is required");
    return t;
}

std::size_t classes_in(const plseg::LabelArray& labels) {
    std::size_t n = 0;
    for (plseg::ClassId c : labels)
        if (c != plseg::kUnlabeled) n = std::max<std::size_t>(n, static_cast<std::size_t>(c) + 1);
    return n;
}

void print_evaluation(std::ostream& out, const plseg::StageEvaluation& ev,
                      const std::vector<std::string>& names) {
    out << "overall_accuracy " << plseg::fmt_metric(ev.oa) << '\n';
    out << "macro_f1 " << (ev.macro_defined ? plseg::fmt_metric(ev.macro) : "undefined")
        << '\n';
    out << "class precision recall f1 support\n";
    for (std::size_t c = 0; c < ev.cm.n_classes; ++c) {
        const plseg::ClassScore s = plseg::class_f1(ev.cm, c);
        out << names[c] << ' ' << plseg::fmt_metric(s.precision) << ' '
            << plseg::fmt_metric(s.recall) << ' '
            << (s.defined ? plseg::fmt_metric(s.f1) : "undefined") << ' ' << ev.cm.row_sum(c)
            << '\n';
    }
}

int cmd_subsample(const std::string& in, const std::string& out, double voxel,
                  const std::string& columns) {
    plseg::TextCloud t = plseg::read_pointcloud_text(in, columns);
    plseg::LabelArray labels = t.has_labels
                                   ? t.labels
                                   : plseg::LabelArray(t.cloud.size(), plseg::kUnlabeled);
    const plseg::SubsampleResult sub = plseg::grid_subsample(t.cloud, labels, voxel);
    plseg::write_pointcloud_text(out, sub.sub_cloud, t.has_labels ? &sub.sub_labels : nullptr,
                                 t.attribute_names);
    std::cout << t.cloud.size() << " -> " << sub.sub_cloud.size() << " points" << std::endl;
    return 0;
}

int cmd_gen_scene(const std::string& recipe, std::uint64_t seed, const std::string& out) {
    const plseg::SceneRecipe r = plseg::load_scene_recipe(recipe);
    const plseg::SyntheticScene scene = plseg::generate_synthetic_scene(r, seed);
    plseg::write_pointcloud_text(out, scene.cloud, &scene.labels, {"intensity"});
    std::cout << scene.cloud.size() << " points, " << scene.n_classes << " classes"
              << std::endl;
    return 0;
}

int cmd_sample_labels(const std::string& in, std::size_t per_class, double cap,
                      std::uint64_t seed, const std::string& out, const std::string& columns) {
    const plseg::TextCloud t = read_labeled(in, columns);
    const std::size_t n_classes = classes_in(t.labels);
    if (n_classes == 0) throw std::runtime_error(in + ": no labeled points");
    const plseg::WeakLabelSet weak =
        plseg::sample_weak_labels(t.labels, n_classes, per_class, cap, seed);
    plseg::write_weak_labels(out, weak);
    std::cout << weak.size() << " weak labels across " << n_classes << " classes" << std::endl;
    for (std::size_t c = 0; c < n_classes; ++c) {
        const auto it = weak.per_class_selected.find(static_cast<plseg::ClassId>(c));
        std::cout << "  class " << c << ": "
                  << (it == weak.per_class_selected.end() ? 0 : it->second) << std::endl;
    }
    return 0;
}

int cmd_train(const std::string& config_path) {
    namespace fs = std::filesystem;
    const plseg::ExperimentConfig cfg = plseg::load_experiment_config(config_path);
    fs::create_directories(cfg.run_dir);
    plseg::detail::ArtifactGuard guard;
    const auto at = [&](const std::string& name) { return cfg.run_dir + "/" + name; };
    try {
        guard.add(at("config_echo.txt"));
        plseg::write_config_echo(at("config_echo.txt"), cfg);
        plseg::PreparedExperiment prep = plseg::prepare_experiment(cfg, &std::cout);
        guard.add(at("weak_labels.txt"));
        plseg::write_weak_labels(at("weak_labels.txt"), prep.weak);

        plseg::TrainerHooks hooks;
        hooks.on_epoch_end = [&](const plseg::TrainState& state, int stage) {
            const plseg::EpochRecord& r = state.log.back();
            if (r.epoch % 10 == 0 || r.epoch == 1)
                std::cout << "stage " << stage << " epoch " << r.epoch
                          << (r.has_min_acc
                                  ? " min_acc " + plseg::fmt_metric(r.min_batch_acc)
                                  : "")
                          << (r.has_train_oa ? " train_OA " + plseg::fmt_metric(r.train_oa)
                                             : "")
                          << std::endl;
        };
        const plseg::TrainState state =
            plseg::train_incomplete(prep.training_data(), prep.weak, cfg.trainer(), hooks);
        guard.add(at("model_stage1.txt"));
        plseg::save_model(at("model_stage1.txt"), plseg::make_checkpoint(cfg, prep, state.params));
        guard.add(at("epochs.csv"));
        plseg::write_epoch_csv(at("epochs.csv"), state.log);

        if (prep.eval) {
            const plseg::LabelArray pred =
                plseg::predict_full_resolution(state.params, prep.standardizer, *prep.eval);
            const plseg::StageEvaluation ev =
                plseg::evaluate_against_truth(pred, prep.eval->full_labels, prep.n_classes);
            print_evaluation(std::cout, ev, prep.class_names);
            const std::vector<std::pair<int, const plseg::StageEvaluation*>> stages = {{1, &ev}};
            guard.add(at("metrics.csv"));
            plseg::write_metrics_csv(at("metrics.csv"), stages, prep.class_names);
            guard.add(at("metrics.json"));
            plseg::write_metrics_json(at("metrics.json"), stages, prep.class_names);
        }
        std::cout << "stage-1 model: " << at("model_stage1.txt") << std::endl;
        return 0;
    } catch (...) {
        guard.quarantine();
        throw;
    }
}

int cmd_pl_train(const std::string& config_path, const std::string& strategy) {
    namespace fs = std::filesystem;
    plseg::ExperimentConfig cfg = plseg::load_experiment_config(config_path);
    cfg.strategy = plseg::parse_strategy(strategy);
    fs::create_directories(cfg.run_dir);
    plseg::detail::ArtifactGuard guard;
    const auto at = [&](const std::string& name) { return cfg.run_dir + "/" + name; };
    try {
        plseg::PreparedExperiment prep = plseg::prepare_experiment(cfg, &std::cout);
        const plseg::ModelCheckpoint ckpt = plseg::load_model(at("model_stage1.txt"));
        if (ckpt.params.layer_sizes.front() != prep.train_features.cols ||
            ckpt.params.layer_sizes.back() != prep.n_classes)
            throw std::runtime_error("stage-1 checkpoint does not match this configuration");

        // resume with a fresh optimizer: the stage-1 weights carry over,
        // momentum and block counters restart
        plseg::TrainState state;
        state.params = ckpt.params;
        state.velocity = plseg::zero_params(ckpt.params.layer_sizes);
        state.trained_count.assign(prep.train.sub.sub_cloud.size(), 0);
        state.epoch = cfg.epochs_stage1;
        state.rng = plseg::make_rng(cfg.seed, /*stream=*/0x7EA2);
        state.stage1_complete = true;

        plseg::TrainerHooks hooks;
        hooks.on_regenerate = [&](const plseg::PseudoLabelSet*,
                                  const plseg::PseudoLabelSet& next) {
            char name[64];
            std::snprintf(name, sizeof(name), "pseudo_gen%03llu.txt",
                          static_cast<unsigned long long>(next.generation));
            guard.add(at(name));
            plseg::write_pseudo_snapshot(at(name), next);
            std::cout << "pseudo generation " << next.generation << ": " << next.size()
                      << " labels, threshold " << plseg::fmt_metric(next.threshold_used)
                      << std::endl;
        };
        hooks.on_epoch_end = [&](const plseg::TrainState& s, int stage) {
            const plseg::EpochRecord& r = s.log.back();
            if (r.epoch % 10 == 0 || r.epoch == cfg.epochs_stage1 + 1)
                std::cout << "stage " << stage << " epoch " << r.epoch << " pseudo "
                          << r.pseudo_count
                          << (r.has_min_acc ? " min_acc " + plseg::fmt_metric(r.min_batch_acc)
                                            : "")
                          << std::endl;
        };
        state = plseg::train_pseudo_assisted(std::move(state), prep.training_data(), prep.weak,
                                             cfg.trainer(), hooks);
        guard.add(at("model_stage2.txt"));
        plseg::save_model(at("model_stage2.txt"), plseg::make_checkpoint(cfg, prep, state.params));
        guard.add(at("epochs_stage2.csv"));
        plseg::write_epoch_csv(at("epochs_stage2.csv"), state.log);

        if (prep.eval) {
            const plseg::LabelArray pred =
                plseg::predict_full_resolution(state.params, prep.standardizer, *prep.eval);
            const plseg::StageEvaluation ev =
                plseg::evaluate_against_truth(pred, prep.eval->full_labels, prep.n_classes);
            print_evaluation(std::cout, ev, prep.class_names);
            const std::vector<std::pair<int, const plseg::StageEvaluation*>> stages = {{2, &ev}};
            guard.add(at("metrics_stage2.csv"));
            plseg::write_metrics_csv(at("metrics_stage2.csv"), stages, prep.class_names);
        }
        std::cout << "stage-2 model: " << at("model_stage2.txt") << std::endl;
        return 0;
    } catch (...) {
        guard.quarantine();
        throw;
    }
}

int cmd_predict(const std::string& model, const std::string& in, const std::string& out,
                const std::string& columns) {
    const plseg::ModelCheckpoint ckpt = plseg::load_model(model);
    plseg::TextCloud t = plseg::read_pointcloud_text(in, columns);
    if (t.cloud.n_attributes != ckpt.attribute_names.size())
        throw std::runtime_error(in + ": attribute count differs from the model's inputs");
    const plseg::PreparedCloud data =
        plseg::prepare_cloud(std::move(t.cloud), {}, t.attribute_names, ckpt.voxel_size,
                             ckpt.feature_k, ckpt.scale_radii);
    const plseg::LabelArray pred =
        plseg::predict_full_resolution(ckpt.params, ckpt.standardizer, data);
    plseg::write_pointcloud_text(out, data.full, &pred, data.attribute_names);
    std::cout << data.full.size() << " points labeled (" << data.sub.sub_cloud.size()
              << " subsampled)" << std::endl;
    return 0;
}

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path,
                 const std::string& report, const std::string& columns) {
    const plseg::TextCloud pred = read_labeled(pred_path, columns);
    const plseg::TextCloud truth = read_labeled(truth_path, columns);
    if (pred.cloud.size() != truth.cloud.size())
        throw std::runtime_error("prediction and truth point counts differ");
    const std::size_t n_classes = std::max(classes_in(pred.labels), classes_in(truth.labels));
    if (n_classes == 0) throw std::runtime_error("no labeled points to evaluate");
    const plseg::StageEvaluation ev =
        plseg::evaluate_against_truth(pred.labels, truth.labels, n_classes);
    const std::vector<std::string> names = plseg::detail::default_class_names(n_classes, false);

    std::ofstream rep(report);
    if (!rep) throw std::runtime_error("cannot write " + report);
    print_evaluation(rep, ev, names);
    rep << "confusion (rows = truth)\n";
    for (std::size_t t = 0; t < n_classes; ++t) {
        rep << names[t];
        for (std::size_t p = 0; p < n_classes; ++p) rep << ' ' << ev.cm.at(t, p);
        rep << '\n';
    }
    print_evaluation(std::cout, ev, names);
    return 0;
}

struct EpochRow {
    int stage = 0;
    double epoch = 0;
    bool has_min_acc = false, has_train_oa = false, has_threshold = false;
    double min_acc = 0, train_oa = 0, threshold = 0;
    double pseudo_count = 0, loss_true = 0, loss_pseudo = 0, lr = 0;
};

std::vector<EpochRow> read_epoch_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<EpochRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream iss(line);
        while (std::getline(iss, cell, ',')) cells.push_back(cell);
        cells.resize(9);
        EpochRow r;
        r.stage = std::stoi(cells[0]);
        r.epoch = std::stod(cells[1]);
        if (!cells[2].empty()) { r.has_min_acc = true; r.min_acc = std::stod(cells[2]); }
        if (!cells[3].empty()) { r.has_train_oa = true; r.train_oa = std::stod(cells[3]); }
        r.pseudo_count = cells[4].empty() ? 0 : std::stod(cells[4]);
        if (!cells[5].empty()) { r.has_threshold = true; r.threshold = std::stod(cells[5]); }
        r.loss_true = cells[6].empty() ? 0 : std::stod(cells[6]);
        r.loss_pseudo = cells[7].empty() ? 0 : std::stod(cells[7]);
        r.lr = cells[8].empty() ? 0 : std::stod(cells[8]);
        rows.push_back(r);
    }
    return rows;
}

/// Minimal standalone line chart; one polyline per series.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
    const double w = 640, h = 360, ml = 60, mr = 20, mt = 40, mb = 40;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [name, pts] : series)
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, y); ymax = std::max(ymax, y);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    const auto sy = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
        << "' viewBox='0 0 " << w << ' ' << h << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-family='sans-serif' "
           "font-size='16'>" << title << "</text>\n";
    out << "<line x1='" << ml << "' y1='" << h - mb << "' x2='" << w - mr << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << h - mb
        << "' stroke='black'/>\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", ymin);
    out << "<text x='" << ml - 6 << "' y='" << h - mb << "' text-anchor='end' "
           "font-family='sans-serif' font-size='11'>" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.4g", ymax);
    out << "<text x='" << ml - 6 << "' y='" << mt + 4 << "' text-anchor='end' "
           "font-family='sans-serif' font-size='11'>" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.4g", xmin);
    out << "<text x='" << ml << "' y='" << h - mb + 16 << "' text-anchor='middle' "
           "font-family='sans-serif' font-size='11'>" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%.4g", xmax);
    out << "<text x='" << w - mr << "' y='" << h - mb + 16 << "' text-anchor='middle' "
           "font-family='sans-serif' font-size='11'>" << buf << "</text>\n";
    std::size_t si = 0;
    for (const auto& [name, pts] : series) {
        const char* color = colors[si % 4];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (const auto& [x, y] : pts) out << sx(x) << ',' << sy(y) << ' ';
        out << "'/>\n";
        out << "<text x='" << w - mr << "' y='" << mt + 14 * static_cast<double>(si)
            << "' text-anchor='end' font-family='sans-serif' font-size='12' fill='" << color
            << "'>" << name << "</text>\n";
        ++si;
    }
    out << "</svg>\n";
}

int cmd_report(const std::string& run_dir) {
    namespace fs = std::filesystem;
    const auto print_file = [&](const std::string& name) {
        const std::string path = run_dir + "/" + name;
        std::ifstream in(path);
        if (!in) return false;
        std::cout << "== " << name << " ==\n" << in.rdbuf() << std::endl;
        return true;
    };
    bool any = print_file("summary.txt");
    any |= print_file("metrics.json");

    for (const std::string csv : {"epochs.csv", "epochs_stage2.csv"}) {
        const std::string path = run_dir + "/" + csv;
        if (!fs::exists(path)) continue;
        const std::vector<EpochRow> rows = read_epoch_csv(path);
        if (rows.empty()) continue;
        any = true;

        std::cout << "== " << csv << " summary ==" << std::endl;
        std::cout << "stage epochs last_train_OA max_pseudo last_threshold" << std::endl;
        for (int stage : {1, 2}) {
            std::size_t n = 0;
            double last_oa = -1, max_pseudo = 0, last_thr = -1;
            for (const EpochRow& r : rows) {
                if (r.stage != stage) continue;
                ++n;
                if (r.has_train_oa) last_oa = r.train_oa;
                max_pseudo = std::max(max_pseudo, r.pseudo_count);
                if (r.has_threshold) last_thr = r.threshold;
            }
            if (n == 0) continue;
            std::cout << stage << ' ' << n << ' '
                      << (last_oa >= 0 ? plseg::fmt_metric(last_oa) : "-") << ' ' << max_pseudo
                      << ' ' << (last_thr >= 0 ? plseg::fmt_metric(last_thr) : "-")
                      << std::endl;
        }

        std::vector<std::pair<double, double>> oa_pts, acc_pts, pseudo_pts;
        for (const EpochRow& r : rows) {
            if (r.has_train_oa) oa_pts.emplace_back(r.epoch, r.train_oa);
            if (r.has_min_acc) acc_pts.emplace_back(r.epoch, r.min_acc);
            pseudo_pts.emplace_back(r.epoch, r.pseudo_count);
        }
        const std::string tag = csv == "epochs.csv" ? "" : "_stage2";
        if (!oa_pts.empty() || !acc_pts.empty()) {
            write_svg_chart(run_dir + "/chart_accuracy" + tag + ".svg",
                            "training accuracy by epoch",
                            {{"train_OA", oa_pts}, {"min_batch_acc", acc_pts}});
            std::cout << "wrote chart_accuracy" << tag << ".svg" << std::endl;
        }
        write_svg_chart(run_dir + "/chart_pseudo_count" + tag + ".svg",
                        "pseudo-label count by epoch", {{"pseudo_count", pseudo_pts}});
        std::cout << "wrote chart_pseudo_count" << tag << ".svg" << std::endl;
    }

    std::vector<std::string> generations;
    if (fs::is_directory(run_dir))
        for (const auto& entry : fs::directory_iterator(run_dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("pseudo_gen", 0) == 0) generations.push_back(name);
        }
    std::sort(generations.begin(), generations.end());
    if (!generations.empty()) {
        std::cout << "== pseudo-label generations ==" << std::endl;
        for (const auto& g : generations) std::cout << g << std::endl;
        any = true;
    }
    if (!any) throw std::runtime_error(run_dir + ": no run artifacts found");
    return 0;
}

int cmd_run(const std::string& config_path) {
    const plseg::ExperimentConfig cfg = plseg::load_experiment_config(config_path);
    const plseg::ExperimentResult result = plseg::run_experiment(cfg, &std::cout);
    if (result.evaluated)
        std::cout << "held-out OA: stage 1 " << plseg::fmt_metric(result.eval_stage1.oa)
                  << ", stage 2 " << plseg::fmt_metric(result.eval_stage2.oa) << std::endl;
    std::cout << "artifacts in " << cfg.run_dir << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weakly supervised point-cloud segmentation with pseudo-label self-training"};
    app.require_subcommand(1);

    std::string in, out, columns, recipe, config_path, model, pred_path, truth_path, report;
    std::string run_dir, strategy = "pl";
    double voxel = 0.4, cap = 0.1;
    std::uint64_t seed = 0;
    std::size_t per_class = 15;

    auto* sub = app.add_subcommand("subsample", "grid-subsample a point cloud");
    sub->add_option("--in", in, "input point file")->required();
    sub->add_option("--out", out, "output point file")->required();
    sub->add_option("--voxel", voxel, "cell size in meters")->capture_default_str();
    sub->add_option("--columns", columns, "column layout for headerless input");

    auto* gen = app.add_subcommand("gen-scene", "generate a synthetic labeled scene");
    gen->add_option("--recipe", recipe, "scene recipe file")->required();
    gen->add_option("--seed", seed, "generator seed")->capture_default_str();
    gen->add_option("--out", out, "output point file")->required();

    auto* lab = app.add_subcommand("sample-labels", "draw a weak-label budget per class");
    lab->add_option("--in", in, "labeled point file")->required();
    lab->add_option("--per-class", per_class, "labels per class")->capture_default_str();
    lab->add_option("--cap", cap, "per-class cap fraction")->capture_default_str();
    lab->add_option("--seed", seed, "sampler seed")->capture_default_str();
    lab->add_option("--out", out, "output weak-label file")->required();
    lab->add_option("--columns", columns, "column layout for headerless input");

    auto* train = app.add_subcommand("train", "stage 1: train on weak labels only");
    train->add_option("--config", config_path, "experiment config file")->required();

    auto* pl = app.add_subcommand("pl-train",
                                  "stage 2: pseudo-label-assisted training from a stage-1 model");
    pl->add_option("--config", config_path, "experiment config file")->required();
    pl->add_option("--strategy", strategy, "pl or pl-all")->capture_default_str();

    auto* predict = app.add_subcommand("predict", "label a point cloud with a trained model");
    predict->add_option("--model", model, "model checkpoint")->required();
    predict->add_option("--in", in, "input point file")->required();
    predict->add_option("--out", out, "output labeled point file")->required();
    predict->add_option("--columns", columns, "column layout for headerless input");

    auto* eval = app.add_subcommand("evaluate", "compare predictions against ground truth");
    eval->add_option("--pred", pred_path, "predicted point file")->required();
    eval->add_option("--truth", truth_path, "ground-truth point file")->required();
    eval->add_option("--report", report, "report output file")->required();
    eval->add_option("--columns", columns, "column layout for headerless input");

    auto* rep = app.add_subcommand("report", "print the artifacts of a finished run");
    rep->add_option("--run-dir", run_dir, "run directory")->required();

    auto* run = app.add_subcommand("run", "full pipeline: both stages plus evaluation");
    run->add_option("--config", config_path, "experiment config file")->required();

    auto* schema = app.add_subcommand("config-schema", "print every config key with defaults");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sub->parsed()) return cmd_subsample(in, out, voxel, columns);
        if (gen->parsed()) return cmd_gen_scene(recipe, seed, out);
        if (lab->parsed()) return cmd_sample_labels(in, per_class, cap, seed, out, columns);
        if (train->parsed()) return cmd_train(config_path);
        if (pl->parsed()) return cmd_pl_train(config_path, strategy);
        if (predict->parsed()) return cmd_predict(model, in, out, columns);
        if (eval->parsed()) return cmd_evaluate(pred_path, truth_path, report, columns);
        if (rep->parsed()) return cmd_report(run_dir);
        if (run->parsed()) return cmd_run(config_path);
        if (schema->parsed()) {
            std::cout << plseg::config_schema();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
