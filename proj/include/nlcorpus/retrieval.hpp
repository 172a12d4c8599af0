#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nlcorpus/pair.hpp"

namespace nlcorpus::retrieval {

enum class Target { intent, code };

Target target_from_string(std::string_view s);
std::string_view to_string(Target t);

// Lowercases and splits. Code mode replaces every character that is not
// alphanumeric or underscore with a space before splitting; intent mode
// splits on whitespace and strips leading/trailing punctuation per token.
std::vector<std::string> tokenize(std::string_view text, Target target);

struct SearchHit {
    std::string doc_id;
    double score = 0.0;
};

// Immutable BM25 inverted index over one field of a pair collection.
//
//   score(q,d) = sum_t idf(t) * tf * (k1+1) / (tf + k1 * (1 - b + b*|d|/avgdl))
//   idf(t)     = ln(1 + (N - df + 0.5) / (df + 0.5))
class Bm25Index {
public:
    static constexpr double kDefaultK1 = 1.2;
    static constexpr double kDefaultB = 0.75;

    static Bm25Index build(const std::vector<NLCodePair>& pairs, Target target,
                           double k1 = kDefaultK1, double b = kDefaultB);

    // Top-k documents with positive score, descending score, ties broken by
    // ascending doc id. Query tokens repeated in the query contribute once
    // per occurrence, matching the score formula's sum over query tokens.
    std::vector<SearchHit> search(std::string_view query_text, std::size_t k) const;

    Target target() const { return target_; }
    double k1() const { return k1_; }
    double b() const { return b_; }
    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    std::size_t doc_length(std::string_view doc_id) const;
    std::size_t term_count() const { return postings_.size(); }

    void save(const std::filesystem::path& path) const;
    static Bm25Index load(const std::filesystem::path& path);

private:
    struct Posting {
        std::uint32_t doc = 0;
        std::uint32_t tf = 0;
    };

    Target target_ = Target::intent;
    double k1_ = kDefaultK1;
    double b_ = kDefaultB;
    std::vector<std::string> doc_ids_;       // ascending; index is the doc handle
    std::vector<std::uint32_t> doc_lengths_;  // by doc handle
    double avg_doc_length_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
};

} // namespace nlcorpus::retrieval
