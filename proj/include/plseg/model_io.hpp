#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plseg/features.hpp"
#include "plseg/mlp.hpp"
#include "plseg/text_io.hpp"

namespace plseg {

/// Everything needed to reproduce predictions: network weights, the feature
/// recipe they were trained on, and the input standardization.
struct ModelCheckpoint {
    ModelParams params;
    Standardizer standardizer;
    double voxel_size = 0.4;
    std::size_t feature_k = 32;
    std::vector<double> scale_radii;
    std::vector<std::string> attribute_names;
    std::size_t n_classes = 0;
    std::vector<std::string> class_names;  // single-token names, optional
    std::uint64_t config_hash = 0;
};

namespace detail {

inline void expect_tag(std::istream& in, const std::string& tag, const std::string& path) {
    std::string got;
    if (!(in >> got) || got != tag)
        throw std::runtime_error(path + ": malformed model file (expected '" + tag + "', got '" +
                                 got + "')");
}

inline void write_doubles(std::ostream& out, const std::vector<double>& v) {
    out << v.size();
    for (double x : v) out << ' ' << fmt_double(x);
    out << '\n';
}

inline std::vector<double> read_doubles(std::istream& in, const std::string& path) {
    std::size_t n = 0;
    if (!(in >> n)) throw std::runtime_error(path + ": malformed model file (vector size)");
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!(in >> v[i]))
            throw std::runtime_error(path + ": malformed model file (vector data)");
    return v;
}

inline void write_strings(std::ostream& out, const std::vector<std::string>& v) {
    out << v.size();
    for (const auto& s : v) out << ' ' << s;
    out << '\n';
}

inline std::vector<std::string> read_strings(std::istream& in, const std::string& path) {
    std::size_t n = 0;
    if (!(in >> n)) throw std::runtime_error(path + ": malformed model file (list size)");
    std::vector<std::string> v(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!(in >> v[i]))
            throw std::runtime_error(path + ": malformed model file (list data)");
    return v;
}

}  // namespace detail

inline void save_model(const std::string& path, const ModelCheckpoint& ckpt) {
    ckpt.params.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "plseg-model 1\n";
    out << "config_hash " << ckpt.config_hash << '\n';
    out << "voxel_size " << fmt_double(ckpt.voxel_size) << '\n';
    out << "feature_k " << ckpt.feature_k << '\n';
    out << "scale_radii ";
    detail::write_doubles(out, ckpt.scale_radii);
    out << "attribute_names ";
    detail::write_strings(out, ckpt.attribute_names);
    out << "n_classes " << ckpt.n_classes << '\n';
    out << "class_names ";
    detail::write_strings(out, ckpt.class_names);
    out << "standardizer_mean ";
    detail::write_doubles(out, ckpt.standardizer.mean);
    out << "standardizer_std ";
    detail::write_doubles(out, ckpt.standardizer.stddev);
    out << "layer_sizes " << ckpt.params.layer_sizes.size();
    for (std::size_t s : ckpt.params.layer_sizes) out << ' ' << s;
    out << '\n';
    for (std::size_t l = 0; l < ckpt.params.weights.size(); ++l) {
        out << "weights " << l << ' ';
        detail::write_doubles(out, ckpt.params.weights[l].data);
        out << "biases " << l << ' ';
        detail::write_doubles(out, ckpt.params.biases[l]);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline ModelCheckpoint load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    ModelCheckpoint ckpt;
    detail::expect_tag(in, "plseg-model", path);
    int version = 0;
    if (!(in >> version) || version != 1)
        throw std::runtime_error(path + ": unsupported model file version");
    detail::expect_tag(in, "config_hash", path);
    in >> ckpt.config_hash;
    detail::expect_tag(in, "voxel_size", path);
    in >> ckpt.voxel_size;
    detail::expect_tag(in, "feature_k", path);
    in >> ckpt.feature_k;
    detail::expect_tag(in, "scale_radii", path);
    ckpt.scale_radii = detail::read_doubles(in, path);
    detail::expect_tag(in, "attribute_names", path);
    ckpt.attribute_names = detail::read_strings(in, path);
    detail::expect_tag(in, "n_classes", path);
    in >> ckpt.n_classes;
    detail::expect_tag(in, "class_names", path);
    ckpt.class_names = detail::read_strings(in, path);
    detail::expect_tag(in, "standardizer_mean", path);
    ckpt.standardizer.mean = detail::read_doubles(in, path);
    detail::expect_tag(in, "standardizer_std", path);
    ckpt.standardizer.stddev = detail::read_doubles(in, path);
    detail::expect_tag(in, "layer_sizes", path);
    std::size_t n_sizes = 0;
    if (!(in >> n_sizes)) throw std::runtime_error(path + ": malformed model file");
    ckpt.params.layer_sizes.resize(n_sizes);
    for (auto& s : ckpt.params.layer_sizes)
        if (!(in >> s)) throw std::runtime_error(path + ": malformed model file");
    const std::size_t n_layers = n_sizes > 0 ? n_sizes - 1 : 0;
    ckpt.params.weights.clear();
    ckpt.params.biases.clear();
    for (std::size_t l = 0; l < n_layers; ++l) {
        detail::expect_tag(in, "weights", path);
        std::size_t idx = 0;
        in >> idx;
        Matrix w(ckpt.params.layer_sizes[l], ckpt.params.layer_sizes[l + 1]);
        w.data = detail::read_doubles(in, path);
        if (w.data.size() != w.rows * w.cols)
            throw std::runtime_error(path + ": weight matrix size mismatch");
        ckpt.params.weights.push_back(std::move(w));
        detail::expect_tag(in, "biases", path);
        in >> idx;
        ckpt.params.biases.push_back(detail::read_doubles(in, path));
    }
    if (!in) throw std::runtime_error(path + ": malformed model file");
    ckpt.params.validate();
    return ckpt;
}

}  // namespace plseg
