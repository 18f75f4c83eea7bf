#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bqfl {

/*
 * Flat key/value document in a TOML subset: `[section]` headers, `key = value`
 * lines and `#` comments. Values are quoted strings, numbers, booleans or
 * one-line arrays of those. Keys are stored as "section.key".
 */
class ConfigDocument {
public:
    static ConfigDocument parse(const std::string& text, const std::string& origin = "<config>");
    static ConfigDocument load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    /// Sets or replaces a value given in config syntax, e.g. set("run.n", "15").
    void set(const std::string& key, const std::string& raw);
    std::vector<std::string> keys() const;

    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<std::int64_t> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    std::optional<std::vector<std::string>> get_list(const std::string& key) const;

    /// Marks a key as understood; `unknown_keys` reports the rest.
    void touch(const std::string& key) const { used_.insert(key); }
    std::vector<std::string> unknown_keys() const;

private:
    struct Entry {
        std::string raw;
        std::string origin;
    };
    const Entry* find(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& expected) const;

    std::map<std::string, Entry> values_;
    mutable std::set<std::string> used_;
};

}  // namespace bqfl
