#include "nlcorpus/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "nlcorpus/errors.hpp"
#include "nlcorpus/util.hpp"

namespace nlcorpus::retrieval {

Target target_from_string(std::string_view s) {
    if (s == "intent") return Target::intent;
    if (s == "code") return Target::code;
    throw Error("unknown retrieval target: " + std::string(s));
}

std::string_view to_string(Target t) {
    return t == Target::intent ? "intent" : "code";
}

std::vector<std::string> tokenize(std::string_view text, Target target) {
    std::vector<std::string> tokens;
    if (target == Target::code) {
        std::string current;
        for (char c : text) {
            if (is_word_char(c)) {
                current += ascii_lower(c);
            } else if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        }
        if (!current.empty()) tokens.push_back(std::move(current));
        return tokens;
    }
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t b = start, e = i;
        while (b < e && !is_word_char(text[b])) ++b;
        while (e > b && !is_word_char(text[e - 1])) --e;
        if (b < e) {
            std::string tok;
            tok.reserve(e - b);
            for (std::size_t j = b; j < e; ++j) tok += ascii_lower(text[j]);
            tokens.push_back(std::move(tok));
        }
    }
    return tokens;
}

Bm25Index Bm25Index::build(const std::vector<NLCodePair>& pairs, Target target, double k1, double b) {
    if (pairs.empty()) throw EmptyCollection("cannot index an empty pair collection");

    std::vector<std::pair<std::string, const NLCodePair*>> by_id;
    by_id.reserve(pairs.size());
    for (const auto& p : pairs) by_id.emplace_back(p.pair_id, &p);
    std::sort(by_id.begin(), by_id.end(),
              [](const auto& a, const auto& b2) { return a.first < b2.first; });
    for (std::size_t i = 1; i < by_id.size(); ++i)
        if (by_id[i].first == by_id[i - 1].first)
            throw DuplicateDocId("duplicate pair_id " + by_id[i].first);

    Bm25Index index;
    index.target_ = target;
    index.k1_ = k1;
    index.b_ = b;
    index.doc_ids_.reserve(by_id.size());
    index.doc_lengths_.reserve(by_id.size());

    std::uint64_t total_len = 0;
    for (std::uint32_t doc = 0; doc < by_id.size(); ++doc) {
        const NLCodePair& p = *by_id[doc].second;
        std::vector<std::string> tokens =
            tokenize(target == Target::intent ? p.intent : p.snippet, target);
        index.doc_ids_.push_back(by_id[doc].first);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
        total_len += tokens.size();

        std::map<std::string, std::uint32_t> tf;
        for (auto& t : tokens) ++tf[t];
        for (auto& [term, count] : tf)
            index.postings_[term].push_back({doc, count});
    }
    index.avg_doc_length_ =
        static_cast<double>(total_len) / static_cast<double>(index.doc_ids_.size());
    return index;
}

std::size_t Bm25Index::doc_length(std::string_view doc_id) const {
    auto it = std::lower_bound(doc_ids_.begin(), doc_ids_.end(), doc_id);
    if (it == doc_ids_.end() || *it != doc_id) throw Error("unknown doc id " + std::string(doc_id));
    return doc_lengths_[static_cast<std::size_t>(it - doc_ids_.begin())];
}

std::vector<SearchHit> Bm25Index::search(std::string_view query_text, std::size_t k) const {
    std::vector<std::string> query = tokenize(query_text, target_);
    const double n_docs = static_cast<double>(doc_ids_.size());

    std::vector<double> scores(doc_ids_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    for (const auto& term : query) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        const double df = static_cast<double>(plist.size());
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        for (const Posting& post : plist) {
            const double tf = static_cast<double>(post.tf);
            const double norm =
                k1_ * (1.0 - b_ + b_ * static_cast<double>(doc_lengths_[post.doc]) / avg_doc_length_);
            if (scores[post.doc] == 0.0) touched.push_back(post.doc);
            scores[post.doc] += idf * tf * (k1_ + 1.0) / (tf + norm);
        }
    }

    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    std::vector<std::uint32_t> positive;
    for (std::uint32_t doc : touched)
        if (scores[doc] > 0.0) positive.push_back(doc);

    // doc indexes ascend with doc ids, so index order is the tie-break order
    std::sort(positive.begin(), positive.end(), [&](std::uint32_t a, std::uint32_t b2) {
        if (scores[a] != scores[b2]) return scores[a] > scores[b2];
        return a < b2;
    });
    if (positive.size() > k) positive.resize(k);

    std::vector<SearchHit> hits;
    hits.reserve(positive.size());
    for (std::uint32_t doc : positive) hits.push_back({doc_ids_[doc], scores[doc]});
    return hits;
}

void Bm25Index::save(const std::filesystem::path& path) const {
    nlohmann::ordered_json j;
    j["format"] = "nlcorpus-bm25";
    j["version"] = 1;
    j["target"] = std::string(to_string(target_));
    j["k1"] = k1_;
    j["b"] = b_;
    nlohmann::ordered_json docs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < doc_ids_.size(); ++i)
        docs.push_back(nlohmann::ordered_json::array({doc_ids_[i], doc_lengths_[i]}));
    j["docs"] = std::move(docs);

    std::vector<std::string> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, _] : postings_) terms.push_back(term);
    std::sort(terms.begin(), terms.end());
    nlohmann::ordered_json posts = nlohmann::ordered_json::array();
    for (const auto& term : terms) {
        nlohmann::ordered_json plist = nlohmann::ordered_json::array();
        for (const Posting& p : postings_.at(term))
            plist.push_back(nlohmann::ordered_json::array({p.doc, p.tf}));
        posts.push_back(nlohmann::ordered_json::array({term, std::move(plist)}));
    }
    j["postings"] = std::move(posts);

    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write index file " + path.string());
    out << j.dump() << "\n";
    if (!out.good()) throw IoFailure("failed while writing index file " + path.string());
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open index file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoFailure("cannot parse index file " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != "nlcorpus-bm25" || j.value("version", 0) != 1)
        throw IoFailure("unsupported index file format in " + path.string());

    Bm25Index index;
    index.target_ = target_from_string(j.at("target").get<std::string>());
    index.k1_ = j.at("k1").get<double>();
    index.b_ = j.at("b").get<double>();
    std::uint64_t total_len = 0;
    for (const auto& d : j.at("docs")) {
        index.doc_ids_.push_back(d.at(0).get<std::string>());
        index.doc_lengths_.push_back(d.at(1).get<std::uint32_t>());
        total_len += index.doc_lengths_.back();
    }
    if (index.doc_ids_.empty()) throw EmptyCollection("index file has no documents");
    index.avg_doc_length_ =
        static_cast<double>(total_len) / static_cast<double>(index.doc_ids_.size());
    for (const auto& entry : j.at("postings")) {
        std::vector<Posting> plist;
        for (const auto& p : entry.at(1))
            plist.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>()});
        index.postings_.emplace(entry.at(0).get<std::string>(), std::move(plist));
    }
    return index;
}

} // namespace nlcorpus::retrieval
