#include "sohkan/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace sohkan::logging {

namespace {

Level parse_env() {
    const char* raw = std::getenv("SOHKAN_LOG");
    if (raw == nullptr) return Level::warn;
    if (std::strcmp(raw, "error") == 0) return Level::error;
    if (std::strcmp(raw, "warn") == 0) return Level::warn;
    if (std::strcmp(raw, "info") == 0) return Level::info;
    if (std::strcmp(raw, "debug") == 0) return Level::debug;
    std::fprintf(stderr, "[warn] unrecognized SOHKAN_LOG value '%s', using 'warn'\n", raw);
    return Level::warn;
}

Level& threshold_ref() {
    static Level level = parse_env();
    return level;
}

const char* tag(Level level) {
    switch (level) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
    }
    return "?";
}

}  // namespace

Level threshold() { return threshold_ref(); }

void set_threshold(Level level) { threshold_ref() = level; }

void write(Level level, const std::string& message) {
    if (static_cast<int>(level) > static_cast<int>(threshold_ref())) return;
    std::fprintf(stderr, "[%s] %s\n", tag(level), message.c_str());
}

}  // namespace sohkan::logging
