#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace sohkan {

/// Flat `key = value` configuration. '#' starts a comment line, blanks are
/// skipped, keys and values are trimmed. Duplicate keys in one file are an
/// error; set() overrides, which is how command-line flags win over the file.
class Config {
public:
    Config() = default;

    [[nodiscard]] static Config load(const std::string& path);
    [[nodiscard]] static Config parse(const std::string& text, const std::string& origin);

    void set(const std::string& key, const std::string& value);
    [[nodiscard]] bool has(const std::string& key) const;

    /// Typed getters return the fallback when the key is absent and throw
    /// when the stored text does not parse as the requested type.
    [[nodiscard]] std::string get_string(const std::string& key,
                                         const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] int get_int(const std::string& key, int fallback) const;
    [[nodiscard]] std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;

    [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace sohkan
