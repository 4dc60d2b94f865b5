#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "dimlab/error.hpp"
#include "dimlab/rng.hpp"

/// Flat, sectioned key-value configuration with explicit types:
///
///   # comment
///   [section]
///   key: type = value
///
/// Types are int, real, bool, string, int_list and real_list. List items are
/// comma-separated. Keys are addressed as "section.key".
namespace dimlab::config {

using IntList = std::vector<long long>;
using RealList = std::vector<double>;
using Value = std::variant<long long, double, bool, std::string, IntList, RealList>;

struct Entry {
    std::string key; // section.key
    Value value;
    int line = 0;
};

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void config_error(int line, const std::string& what) {
    fail(ErrorCode::Config, (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + what);
}

inline long long parse_int(const std::string& s, int line) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) config_error(line, "not an integer: '" + s + "'");
    return v;
}

inline double parse_real(const std::string& s, int line) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) config_error(line, "not a real number: '" + s + "'");
    return v;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) out.push_back(trim(item));
    return out;
}

class ConfigFile {
public:
    static ConfigFile parse(std::istream& is) {
        ConfigFile cfg;
        std::string section;
        std::string raw;
        int line = 0;
        while (std::getline(is, raw)) {
            ++line;
            std::string text = trim(raw);
            if (text.empty() || text[0] == '#') continue;
            if (text.front() == '[') {
                if (text.back() != ']') config_error(line, "unterminated section header");
                section = trim(std::string_view(text).substr(1, text.size() - 2));
                if (section.empty()) config_error(line, "empty section name");
                continue;
            }
            if (section.empty()) config_error(line, "entry outside of a section");
            const auto colon = text.find(':');
            const auto eq = text.find('=');
            if (colon == std::string::npos || eq == std::string::npos || eq < colon)
                config_error(line, "expected 'key: type = value'");
            const std::string key = trim(std::string_view(text).substr(0, colon));
            const std::string type = trim(std::string_view(text).substr(colon + 1, eq - colon - 1));
            const std::string val = trim(std::string_view(text).substr(eq + 1));
            if (key.empty()) config_error(line, "empty key");
            const std::string full = section + "." + key;
            if (cfg.index_.count(full)) config_error(line, "duplicate field '" + full + "'");
            Value v;
            if (type == "int") {
                v = parse_int(val, line);
            } else if (type == "real") {
                v = parse_real(val, line);
            } else if (type == "bool") {
                if (val != "true" && val != "false") config_error(line, "bool must be true or false");
                v = val == "true";
            } else if (type == "string") {
                std::string s = val;
                if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
                v = s;
            } else if (type == "int_list") {
                IntList l;
                for (const auto& item : split_list(val)) l.push_back(parse_int(item, line));
                v = l;
            } else if (type == "real_list") {
                RealList l;
                for (const auto& item : split_list(val)) l.push_back(parse_real(item, line));
                v = l;
            } else {
                config_error(line, "unknown type '" + type + "' for field '" + full + "'");
            }
            cfg.index_[full] = cfg.entries_.size();
            cfg.entries_.push_back({full, std::move(v), line});
        }
        return cfg;
    }

    static ConfigFile parse(const std::string& text) {
        std::istringstream is(text);
        return parse(is);
    }

    static ConfigFile load(const std::filesystem::path& path) {
        std::ifstream is(path);
        require(bool(is), ErrorCode::Io, "cannot open config " + path.string());
        return parse(is);
    }

    const std::vector<Entry>& entries() const { return entries_; }

    const Entry* find(const std::string& key) const {
        auto it = index_.find(key);
        return it == index_.end() ? nullptr : &entries_[it->second];
    }

private:
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> index_;
};

/// Typed access that records which fields were read, so leftover
/// (unknown) fields can be reported by name.
class Reader {
public:
    explicit Reader(const ConfigFile& file) : file_(file) {}

    bool has(const std::string& key) const { return file_.find(key) != nullptr; }

    long long get_int(const std::string& key, long long fallback) { return get<long long>(key, fallback, "int"); }

    double get_real(const std::string& key, double fallback) {
        const Entry* e = touch(key);
        if (!e) return fallback;
        if (auto* i = std::get_if<long long>(&e->value)) return static_cast<double>(*i);
        if (auto* r = std::get_if<double>(&e->value)) return *r;
        config_error(e->line, "field '" + key + "' must be real");
    }

    bool get_bool(const std::string& key, bool fallback) { return get<bool>(key, fallback, "bool"); }

    std::string get_string(const std::string& key, const std::string& fallback) {
        return get<std::string>(key, fallback, "string");
    }

    IntList get_int_list(const std::string& key, const IntList& fallback) {
        return get<IntList>(key, fallback, "int_list");
    }

    RealList get_real_list(const std::string& key, const RealList& fallback) {
        const Entry* e = touch(key);
        if (!e) return fallback;
        if (auto* r = std::get_if<RealList>(&e->value)) return *r;
        if (auto* i = std::get_if<IntList>(&e->value)) return RealList(i->begin(), i->end());
        config_error(e->line, "field '" + key + "' must be real_list");
    }

    /// Line of a field, for diagnostics (0 if absent).
    int line_of(const std::string& key) const {
        const Entry* e = file_.find(key);
        return e ? e->line : 0;
    }

    /// Throws a Config error naming the first field that was never read.
    void reject_unknown() const {
        for (const auto& e : file_.entries())
            if (!used_.count(e.key)) config_error(e.line, "unknown field '" + e.key + "'");
    }

private:
    const Entry* touch(const std::string& key) {
        used_.insert(key);
        return file_.find(key);
    }

    template <class T>
    T get(const std::string& key, const T& fallback, const char* type) {
        const Entry* e = touch(key);
        if (!e) return fallback;
        if (auto* v = std::get_if<T>(&e->value)) return *v;
        config_error(e->line, "field '" + key + "' must be " + std::string(type));
    }

    const ConfigFile& file_;
    std::set<std::string> used_;
};

/// Canonical "key=value" lines, sorted by key, hashed with FNV-1a. Callers
/// build the canonical form from a fully resolved (defaults applied) config
/// so the fingerprint ignores field order and explicit-vs-implicit defaults.
class Canonical {
public:
    void add(const std::string& key, const std::string& value) { fields_[key] = value; }

    std::string text() const {
        std::string out;
        for (const auto& [k, v] : fields_) out += k + "=" + v + "\n";
        return out;
    }

    std::uint64_t fingerprint() const { return fnv1a64(text()); }

private:
    std::map<std::string, std::string> fields_;
};

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    return s;
}

} // namespace dimlab::config
