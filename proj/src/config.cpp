#include "sohkan/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sohkan {

namespace {

std::string trim(const std::string& text) {
    const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    auto begin = std::find_if_not(text.begin(), text.end(), is_space);
    auto end = std::find_if_not(text.rbegin(), text.rend(), is_space).base();
    return begin < end ? std::string(begin, end) : std::string();
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse(buffer.str(), path);
}

Config Config::parse(const std::string& text, const std::string& origin) {
    Config config;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (config.values_.count(key) != 0) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": duplicate key '" + key + "'");
        }
        config.values_[key] = value;
    }
    return config;
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it != values_.end() ? it->second : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    double parsed = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw std::runtime_error("config key '" + key + "': '" + v + "' is not a number");
    }
    return parsed;
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    int parsed = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw std::runtime_error("config key '" + key + "': '" + v + "' is not an integer");
    }
    return parsed;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    std::uint64_t parsed = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw std::runtime_error("config key '" + key + "': '" + v +
                                 "' is not an unsigned integer");
    }
    return parsed;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("config key '" + key + "': '" + it->second + "' is not a boolean");
}

}  // namespace sohkan
