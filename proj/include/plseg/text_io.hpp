#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plseg/kv.hpp"
#include "plseg/point_cloud.hpp"
#include "plseg/pseudo_labels.hpp"
#include "plseg/weak_labels.hpp"

namespace plseg {

/// Shortest round-trip-exact decimal form of a double.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Compact form for report files; still deterministic.
inline std::string fmt_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct TextCloud {
    PointCloud cloud;
    LabelArray labels;  // empty unless has_labels
    bool has_labels = false;
    std::vector<std::string> attribute_names;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

inline double parse_double_tok(const std::string& tok, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw std::runtime_error(where + ": bad number '" + tok + "'");
    return v;
}

inline long parse_int_tok(const std::string& tok, const std::string& where) {
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
        throw std::runtime_error(where + ": bad integer '" + tok + "'");
    return v;
}

}  // namespace detail

/// Reads a whitespace-separated point file. Column layout comes from the
/// `columns` argument or, when it is empty, from a `# columns: ...` header
/// line. Recognized tokens: x, y, z (required), label (or class), `_` to
/// skip a column; any other token names an extra per-point attribute.
/// Unlabeled points carry label -1.
inline TextCloud read_pointcloud_text(const std::string& path,
                                      const std::string& columns = "") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::vector<std::string> layout = detail::split_ws(columns);
    TextCloud out;
    std::string line;
    std::size_t line_no = 0;
    int ix = -1, iy = -1, iz = -1, ilabel = -1;
    std::vector<std::pair<int, std::string>> attr_cols;  // column index, name
    bool layout_ready = false;

    auto compile_layout = [&]() {
        for (std::size_t c = 0; c < layout.size(); ++c) {
            const std::string& t = layout[c];
            if (t == "x") ix = static_cast<int>(c);
            else if (t == "y") iy = static_cast<int>(c);
            else if (t == "z") iz = static_cast<int>(c);
            else if (t == "label" || t == "class") ilabel = static_cast<int>(c);
            else if (t != "_") attr_cols.emplace_back(static_cast<int>(c), t);
        }
        if (ix < 0 || iy < 0 || iz < 0)
            throw std::runtime_error(path + ": column layout must name x, y and z");
        out.has_labels = ilabel >= 0;
        for (auto& [c, name] : attr_cols) out.attribute_names.push_back(name);
        out.cloud.n_attributes = attr_cols.size();
        layout_ready = true;
    };
    if (!layout.empty()) compile_layout();

    std::vector<double> attrs;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::string prefix = "# columns:";
            if (!layout_ready && t.rfind(prefix, 0) == 0) {
                layout = detail::split_ws(t.substr(prefix.size()));
                compile_layout();
            }
            continue;
        }
        if (!layout_ready)
            throw std::runtime_error(path + ": no column layout (missing '# columns:' header)");

        const std::vector<std::string> toks = detail::split_ws(t);
        const std::string where = path + ":" + std::to_string(line_no);
        if (toks.size() != layout.size())
            throw std::runtime_error(where + ": expected " + std::to_string(layout.size()) +
                                     " columns, got " + std::to_string(toks.size()));
        const double x = detail::parse_double_tok(toks[static_cast<std::size_t>(ix)], where);
        const double y = detail::parse_double_tok(toks[static_cast<std::size_t>(iy)], where);
        const double z = detail::parse_double_tok(toks[static_cast<std::size_t>(iz)], where);
        attrs.clear();
        for (auto& [c, name] : attr_cols)
            attrs.push_back(detail::parse_double_tok(toks[static_cast<std::size_t>(c)], where));
        out.cloud.push_point({x, y, z}, attrs);
        if (out.has_labels)
            out.labels.push_back(static_cast<ClassId>(
                detail::parse_int_tok(toks[static_cast<std::size_t>(ilabel)], where)));
    }
    out.cloud.validate();
    return out;
}

inline void write_pointcloud_text(const std::string& path, const PointCloud& cloud,
                                  const LabelArray* labels,
                                  const std::vector<std::string>& attribute_names) {
    if (attribute_names.size() != cloud.n_attributes)
        throw std::invalid_argument("write_pointcloud_text: attribute name count mismatch");
    if (labels && labels->size() != cloud.size())
        throw std::invalid_argument("write_pointcloud_text: label count mismatch");
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot write " + path);
    outf << "# columns: x y z";
    for (const auto& name : attribute_names) outf << ' ' << name;
    if (labels) outf << " label";
    outf << '\n';
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.positions[i];
        outf << fmt_double(p.x) << ' ' << fmt_double(p.y) << ' ' << fmt_double(p.z);
        for (std::size_t a = 0; a < cloud.n_attributes; ++a)
            outf << ' ' << fmt_double(cloud.attribute(i, a));
        if (labels) outf << ' ' << (*labels)[i];
        outf << '\n';
    }
    if (!outf) throw std::runtime_error("write failed: " + path);
}

inline void write_weak_labels(const std::string& path, const WeakLabelSet& weak) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot write " + path);
    outf << "# weak-labels seed=" << weak.seed << " per_class=" << weak.per_class_requested
         << '\n';
    outf << "# columns: index label\n";
    for (std::size_t i = 0; i < weak.indices.size(); ++i)
        outf << weak.indices[i] << ' ' << weak.labels[i] << '\n';
    if (!outf) throw std::runtime_error("write failed: " + path);
}

/// Reads back index/label pairs; header metadata is restored when present.
inline WeakLabelSet read_weak_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    WeakLabelSet weak;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::istringstream iss(t.substr(1));
            std::string tok;
            while (iss >> tok) {
                if (tok.rfind("seed=", 0) == 0)
                    weak.seed = std::stoull(tok.substr(5));
                else if (tok.rfind("per_class=", 0) == 0)
                    weak.per_class_requested = std::stoull(tok.substr(10));
            }
            continue;
        }
        const std::string where = path + ":" + std::to_string(line_no);
        const std::vector<std::string> toks = detail::split_ws(t);
        if (toks.size() != 2) throw std::runtime_error(where + ": expected 'index label'");
        weak.indices.push_back(
            static_cast<std::size_t>(detail::parse_int_tok(toks[0], where)));
        weak.labels.push_back(static_cast<ClassId>(detail::parse_int_tok(toks[1], where)));
    }
    return weak;
}

inline void write_pseudo_snapshot(const std::string& path, const PseudoLabelSet& set) {
    std::ofstream outf(path);
    if (!outf) throw std::runtime_error("cannot write " + path);
    outf << "# threshold " << fmt_double(set.threshold_used) << '\n';
    outf << "generation,point_index,class_id,confidence\n";
    for (std::size_t i = 0; i < set.indices.size(); ++i)
        outf << set.generation << ',' << set.indices[i] << ',' << set.labels[i] << ','
             << fmt_double(set.confidences[i]) << '\n';
    if (!outf) throw std::runtime_error("write failed: " + path);
}

}  // namespace plseg
