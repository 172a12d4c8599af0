#pragma once

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace nlcorpus {

// 64-bit FNV-1a. Used for pair ids and manifest checksums; stable across
// platforms, unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 14695981039346656037ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

inline bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// true if `word` occurs in `text` delimited by non-word characters.
// Matching is case-sensitive.
inline bool contains_word(std::string_view text, std::string_view word) {
    if (word.empty()) return false;
    std::size_t pos = 0;
    while ((pos = text.find(word, pos)) != std::string_view::npos) {
        bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
        std::size_t end = pos + word.size();
        bool right_ok = end == text.size() || !is_word_char(text[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

// Log level comes from the NLCORPUS_LOG environment variable only.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("NLCORPUS_LOG");
        if (!env) return LogLevel::warn;
        std::string_view v(env);
        if (v == "error") return LogLevel::error;
        if (v == "info") return LogLevel::info;
        if (v == "debug") return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

inline void log_msg(LogLevel level, std::string_view msg) {
    if (level > log_level()) return;
    const char* tag = level == LogLevel::error  ? "error"
                      : level == LogLevel::warn ? "warn"
                      : level == LogLevel::info ? "info"
                                                : "debug";
    std::cerr << "[nlcorpus " << tag << "] " << msg << "\n";
}

inline void log_error(std::string_view msg) { log_msg(LogLevel::error, msg); }
inline void log_warn(std::string_view msg) { log_msg(LogLevel::warn, msg); }
inline void log_info(std::string_view msg) { log_msg(LogLevel::info, msg); }

} // namespace nlcorpus
