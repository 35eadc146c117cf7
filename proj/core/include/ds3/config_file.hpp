#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ds3 {

/// One `[name]` section of the flat key-value config format. Entries keep
/// file order.
struct ConfigSection {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;
};

/// Parses the documented config format: `[section]` headers, `key = value`
/// lines, `#` comment lines, blank lines ignored. Keys outside a section and
/// duplicate keys within one are configuration errors.
std::vector<ConfigSection> parse_config_file(const std::string& path);
std::vector<ConfigSection> parse_config_text(const std::string& text, const std::string& origin);

/// Typed accessor over one section. Every key must be consumed; finish()
/// rejects unknown keys so config typos fail fast.
class SectionReader {
public:
    explicit SectionReader(const ConfigSection& section);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback);
    std::string require_string(const std::string& key);
    std::int64_t get_int(const std::string& key, std::int64_t fallback);
    std::int64_t require_int(const std::string& key);
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
    double get_double(const std::string& key, double fallback);
    bool get_bool(const std::string& key, bool fallback);

    /// Throws ConfigError naming any key never consumed.
    void finish() const;

private:
    const ConfigSection& section_;
    std::vector<bool> consumed_;
    const std::string* find(const std::string& key);
};

}  // namespace ds3
