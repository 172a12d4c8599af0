#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "nlcorpus/errors.hpp"
#include "nlcorpus/util.hpp"

namespace nlcorpus {

enum class Source { annotated, mined, api };

inline std::string_view to_string(Source s) {
    switch (s) {
        case Source::annotated: return "annotated";
        case Source::mined: return "mined";
        case Source::api: return "api";
    }
    return "api";
}

inline Source source_from_string(std::string_view s) {
    if (s == "annotated") return Source::annotated;
    if (s == "mined") return Source::mined;
    if (s == "api") return Source::api;
    throw Error("unknown source tag: " + std::string(s));
}

// Content hash of (intent, snippet); the universal dedup / identity key.
inline std::string compute_pair_id(std::string_view intent, std::string_view snippet) {
    std::uint64_t h = fnv1a64(intent);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(snippet, h);
    return to_hex(h);
}

struct NLCodePair {
    std::string intent;
    std::string snippet;
    Source source = Source::api;
    std::optional<double> confidence;  // mined only
    std::string pair_id;

    static NLCodePair make(std::string intent, std::string snippet, Source source,
                           std::optional<double> confidence = std::nullopt) {
        NLCodePair p;
        p.pair_id = compute_pair_id(intent, snippet);
        p.intent = std::move(intent);
        p.snippet = std::move(snippet);
        p.source = source;
        p.confidence = confidence;
        return p;
    }
};

} // namespace nlcorpus
