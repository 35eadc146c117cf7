#include "ds3/config_file.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ds3/error.hpp"

namespace ds3 {

namespace {

std::string trimmed(std::string s) {
    const auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.back())) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && is_space(s[i])) ++i;
    return s.substr(i);
}

}  // namespace

std::vector<ConfigSection> parse_config_text(const std::string& text, const std::string& origin) {
    std::vector<ConfigSection> sections;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trimmed(raw);
        if (line.empty() || line[0] == '#') continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header at " + where);
            const std::string name = trimmed(line.substr(1, line.size() - 2));
            if (name.empty()) throw ConfigError("empty section name at " + where);
            sections.push_back(ConfigSection{name, {}});
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value at " + where);
        if (sections.empty()) throw ConfigError("key outside any section at " + where);
        const std::string key = trimmed(line.substr(0, eq));
        const std::string value = trimmed(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at " + where);
        for (const auto& [k, v] : sections.back().entries)
            if (k == key) throw ConfigError("duplicate key '" + key + "' at " + where);
        sections.back().entries.emplace_back(key, value);
    }
    return sections;
}

std::vector<ConfigSection> parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

SectionReader::SectionReader(const ConfigSection& section)
    : section_(section), consumed_(section.entries.size(), false) {}

const std::string* SectionReader::find(const std::string& key) {
    for (std::size_t i = 0; i < section_.entries.size(); ++i) {
        if (section_.entries[i].first == key) {
            consumed_[i] = true;
            return &section_.entries[i].second;
        }
    }
    return nullptr;
}

bool SectionReader::has(const std::string& key) const {
    for (const auto& [k, v] : section_.entries)
        if (k == key) return true;
    return false;
}

std::string SectionReader::get_string(const std::string& key, const std::string& fallback) {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

std::string SectionReader::require_string(const std::string& key) {
    const std::string* v = find(key);
    if (!v) throw ConfigError("missing key '" + key + "' in section [" + section_.name + "]");
    return *v;
}

std::int64_t SectionReader::get_int(const std::string& key, std::int64_t fallback) {
    const std::string* v = find(key);
    if (!v) return fallback;
    errno = 0;
    char* end = nullptr;
    const long long parsed = std::strtoll(v->c_str(), &end, 10);
    if (end != v->c_str() + v->size() || errno == ERANGE || v->empty())
        throw ConfigError("key '" + key + "' expects an integer, got '" + *v + "'");
    return parsed;
}

std::int64_t SectionReader::require_int(const std::string& key) {
    if (!has(key)) throw ConfigError("missing key '" + key + "' in section [" + section_.name + "]");
    return get_int(key, 0);
}

std::uint64_t SectionReader::get_uint(const std::string& key, std::uint64_t fallback) {
    const std::string* v = find(key);
    if (!v) return fallback;
    errno = 0;
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(v->c_str(), &end, 10);
    if (end != v->c_str() + v->size() || errno == ERANGE || v->empty())
        throw ConfigError("key '" + key + "' expects an unsigned integer, got '" + *v + "'");
    return parsed;
}

double SectionReader::get_double(const std::string& key, double fallback) {
    const std::string* v = find(key);
    if (!v) return fallback;
    errno = 0;
    char* end = nullptr;
    const double parsed = std::strtod(v->c_str(), &end);
    if (end != v->c_str() + v->size() || errno == ERANGE || v->empty())
        throw ConfigError("key '" + key + "' expects a number, got '" + *v + "'");
    return parsed;
}

bool SectionReader::get_bool(const std::string& key, bool fallback) {
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw ConfigError("key '" + key + "' expects true/false, got '" + *v + "'");
}

void SectionReader::finish() const {
    for (std::size_t i = 0; i < consumed_.size(); ++i)
        if (!consumed_[i])
            throw ConfigError("unknown key '" + section_.entries[i].first + "' in section [" +
                              section_.name + "]");
}

}  // namespace ds3
