#include "bqfl/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bqfl {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') {
            quoted = !quoted;
        } else if (line[i] == '#' && !quoted) {
            return line.substr(0, i);
        }
    }
    return line;
}

bool is_quoted(const std::string& s) { return s.size() >= 2 && s.front() == '"' && s.back() == '"'; }

std::string unquote(const std::string& s) { return is_quoted(s) ? s.substr(1, s.size() - 2) : s; }

std::vector<std::string> split_array(const std::string& raw) {
    std::vector<std::string> items;
    const std::string body = trim(raw.substr(1, raw.size() - 2));
    if (body.empty()) {
        return items;
    }
    std::string current;
    bool quoted = false;
    for (const char c : body) {
        if (c == '"') {
            quoted = !quoted;
        }
        if (c == ',' && !quoted) {
            items.push_back(unquote(trim(current)));
            current.clear();
        } else {
            current += c;
        }
    }
    items.push_back(unquote(trim(current)));
    return items;
}

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& origin) {
    ConfigDocument doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        line = trim(strip_comment(line));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw std::runtime_error(where + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(where + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw std::runtime_error(where + ": expected 'key = value'");
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (doc.values_.count(full)) {
            throw std::runtime_error(where + ": duplicate key '" + full + "'");
        }
        doc.values_[full] = Entry{value, where};
    }
    return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read config file " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
}

void ConfigDocument::set(const std::string& key, const std::string& raw) { values_[key] = Entry{raw, "<override>"}; }

std::vector<std::string> ConfigDocument::keys() const {
    std::vector<std::string> out;
    for (const auto& entry : values_) {
        out.push_back(entry.first);
    }
    return out;
}

const ConfigDocument::Entry* ConfigDocument::find(const std::string& key) const {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

void ConfigDocument::fail(const std::string& key, const std::string& expected) const {
    const auto& entry = values_.at(key);
    throw std::runtime_error(entry.origin + ": config field '" + key + "' expected " + expected + ", got '" +
                             entry.raw + "'");
}

std::optional<std::string> ConfigDocument::get_string(const std::string& key) const {
    const auto* e = find(key);
    if (!e) {
        return std::nullopt;
    }
    if (!e->raw.empty() && e->raw.front() == '[') {
        fail(key, "a string");
    }
    return unquote(e->raw);
}

std::optional<double> ConfigDocument::get_double(const std::string& key) const {
    const auto* e = find(key);
    if (!e) {
        return std::nullopt;
    }
    const std::string s = unquote(e->raw);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE) {
        fail(key, "a number");
    }
    return v;
}

std::optional<std::int64_t> ConfigDocument::get_int(const std::string& key) const {
    const auto* e = find(key);
    if (!e) {
        return std::nullopt;
    }
    const std::string s = unquote(e->raw);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno == ERANGE) {
        fail(key, "an integer");
    }
    return v;
}

std::optional<bool> ConfigDocument::get_bool(const std::string& key) const {
    const auto* e = find(key);
    if (!e) {
        return std::nullopt;
    }
    const std::string s = unquote(e->raw);
    if (s == "true") {
        return true;
    }
    if (s == "false") {
        return false;
    }
    fail(key, "true or false");
}

std::optional<std::vector<std::string>> ConfigDocument::get_list(const std::string& key) const {
    const auto* e = find(key);
    if (!e) {
        return std::nullopt;
    }
    if (e->raw.size() >= 2 && e->raw.front() == '[' && e->raw.back() == ']') {
        return split_array(e->raw);
    }
    // A bare comma-separated string is accepted as a list too.
    std::vector<std::string> items;
    std::stringstream ss(unquote(e->raw));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

std::vector<std::string> ConfigDocument::unknown_keys() const {
    std::vector<std::string> out;
    for (const auto& entry : values_) {
        if (!used_.count(entry.first)) {
            out.push_back(entry.first);
        }
    }
    return out;
}

}  // namespace bqfl
