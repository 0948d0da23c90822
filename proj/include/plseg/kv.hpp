#pragma once

#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace plseg {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// ignored; inline comments are not supported. Duplicate keys keep the last
/// value.
inline std::map<std::string, std::string> parse_key_values(std::istream& in,
                                                           const std::string& source) {
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(source + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(source + ":" + std::to_string(line_no) + ": empty key");
        out[key] = value;
    }
    return out;
}

inline std::map<std::string, std::string> read_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return parse_key_values(in, path);
}

inline double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                        double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("key '" + key + "': bad number '" + it->second + "'");
    return v;
}

inline long long kv_int(const std::map<std::string, std::string>& kv, const std::string& key,
                        long long fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    std::size_t pos = 0;
    const long long v = std::stoll(it->second, &pos);
    if (pos != it->second.size())
        throw std::runtime_error("key '" + key + "': bad integer '" + it->second + "'");
    return v;
}

inline bool kv_bool(const std::map<std::string, std::string>& kv, const std::string& key,
                    bool fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("key '" + key + "': bad boolean '" + v + "'");
}

inline std::string kv_string(const std::map<std::string, std::string>& kv,
                             const std::string& key, const std::string& fallback) {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

}  // namespace plseg
