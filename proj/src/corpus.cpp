#include "nlcorpus/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "nlcorpus/errors.hpp"
#include "nlcorpus/util.hpp"

namespace nlcorpus::corpus {

StrategyLabel label_from_string(std::string_view s) {
    if (s == "man") return StrategyLabel::man;
    if (s == "man_mine") return StrategyLabel::man_mine;
    if (s == "man_mine_api") return StrategyLabel::man_mine_api;
    throw Error("unknown data strategy label: " + std::string(s));
}

std::string_view to_string(StrategyLabel label) {
    switch (label) {
        case StrategyLabel::man: return "man";
        case StrategyLabel::man_mine: return "man_mine";
        case StrategyLabel::man_mine_api: return "man_mine_api";
    }
    return "man";
}

ApiSource api_source_from_string(std::string_view s) {
    if (s == "none") return ApiSource::none;
    if (s == "raw") return ApiSource::raw;
    if (s == "direct") return ApiSource::direct;
    if (s == "dist") return ApiSource::dist;
    throw Error("unknown api source: " + std::string(s));
}

std::string_view to_string(ApiSource src) {
    switch (src) {
        case ApiSource::none: return "none";
        case ApiSource::raw: return "raw";
        case ApiSource::direct: return "direct";
        case ApiSource::dist: return "dist";
    }
    return "none";
}

namespace {

struct RecordSource {
    bool per_record = false;
    Source source = Source::api;
};

NLCodePair pair_from_json(const nlohmann::json& j, RecordSource mode) {
    if (!j.is_object()) throw Error("record is not an object");
    Source source = mode.source;
    if (mode.per_record && j.contains("source") && j["source"].is_string())
        source = source_from_string(j["source"].get<std::string>());

    std::string intent;
    if (j.contains("rewritten_intent") && j["rewritten_intent"].is_string() &&
        !j["rewritten_intent"].get<std::string>().empty())
        intent = j["rewritten_intent"].get<std::string>();
    else if (j.contains("intent") && j["intent"].is_string())
        intent = j["intent"].get<std::string>();
    if (intent.empty()) throw Error("missing or empty intent");

    if (!j.contains("snippet") || !j["snippet"].is_string()) throw Error("missing snippet");
    std::string snippet = j["snippet"].get<std::string>();
    if (snippet.empty()) throw Error("empty snippet");

    NLCodePair pair;
    pair.intent = std::move(intent);
    pair.snippet = std::move(snippet);
    pair.source = source;
    if (source == Source::mined) {
        if (!j.contains("confidence") || !j["confidence"].is_number())
            throw Error("mined record lacks confidence");
        double c = j["confidence"].get<double>();
        if (c < 0.0 || c > 1.0) throw Error("confidence out of [0,1]");
        pair.confidence = c;
    }
    if (j.contains("pair_id") && j["pair_id"].is_string() && !j["pair_id"].get<std::string>().empty())
        pair.pair_id = j["pair_id"].get<std::string>();
    else
        pair.pair_id = compute_pair_id(pair.intent, pair.snippet);
    return pair;
}

LoadResult load_pairs_impl(const std::filesystem::path& path, RecordSource mode) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open pair file " + path.string());

    LoadResult result;
    std::size_t records = 0;

    // Whole-file JSON array (CoNaLa upstream layout) or JSONL.
    char first = 0;
    while (in.get(first) && std::isspace(static_cast<unsigned char>(first))) {
    }
    in.seekg(0);
    if (first == '[') {
        nlohmann::json root;
        try {
            in >> root;
        } catch (const std::exception& e) {
            throw MalformedRecord("cannot parse " + path.string() + ": " + e.what());
        }
        if (!root.is_array()) throw MalformedRecord(path.string() + ": top-level value is not an array");
        std::size_t index = 0;
        for (const auto& rec : root) {
            ++index;
            ++records;
            try {
                result.pairs.push_back(pair_from_json(rec, mode));
            } catch (const std::exception& e) {
                result.malformed_lines.push_back(index);
                log_warn(path.string() + " record " + std::to_string(index) + ": " + e.what());
            }
        }
    } else {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            ++records;
            try {
                result.pairs.push_back(pair_from_json(nlohmann::json::parse(line), mode));
            } catch (const std::exception& e) {
                result.malformed_lines.push_back(line_no);
                log_warn(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
            }
        }
    }

    if (records > 0 && result.malformed_lines.size() * 100 > records)
        throw MalformedRecord(path.string() + ": " + std::to_string(result.malformed_lines.size()) +
                              " of " + std::to_string(records) + " records malformed (over 1%)");
    return result;
}

} // namespace

LoadResult load_pairs(const std::filesystem::path& path, Source source) {
    return load_pairs_impl(path, {false, source});
}

LoadResult load_pairs_untagged(const std::filesystem::path& path) {
    return load_pairs_impl(path, {true, Source::api});
}

void save_pairs(const std::vector<NLCodePair>& pairs, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write pair file " + path.string());
    for (const auto& p : pairs) {
        nlohmann::ordered_json j;
        j["intent"] = p.intent;
        j["snippet"] = p.snippet;
        j["source"] = std::string(to_string(p.source));
        if (p.confidence) j["confidence"] = *p.confidence;
        j["pair_id"] = p.pair_id;
        out << j.dump() << "\n";
    }
    if (!out.good()) throw IoFailure("failed while writing pair file " + path.string());
}

std::vector<NLCodePair> select_top_mined(std::vector<NLCodePair> mined, std::size_t top_k) {
    for (const auto& p : mined)
        if (!p.confidence)
            throw MissingConfidence("mined pair " + p.pair_id + " has no confidence score");
    std::stable_sort(mined.begin(), mined.end(), [](const NLCodePair& a, const NLCodePair& b) {
        if (*a.confidence != *b.confidence) return *a.confidence > *b.confidence;
        return a.pair_id < b.pair_id;
    });
    if (mined.size() > top_k) mined.resize(top_k);
    return mined;
}

AssembledCorpus assemble(const DataStrategy& strategy, const std::vector<NLCodePair>& ann_train,
                         const std::vector<NLCodePair>& mined,
                         const std::vector<NLCodePair>& api_pairs) {
    if (strategy.api_source != ApiSource::none && strategy.label != StrategyLabel::man_mine_api)
        throw StrategyMismatch("api_source set but strategy label is not man_mine_api");
    if (strategy.label == StrategyLabel::man_mine_api && strategy.api_source == ApiSource::none)
        throw StrategyMismatch("man_mine_api strategy needs an api_source");

    AssembledCorpus out;
    out.finetune = ann_train;
    if (strategy.label == StrategyLabel::man) return out;

    out.pretrain = select_top_mined(mined, strategy.mined_top_k);
    if (strategy.label == StrategyLabel::man_mine_api)
        out.pretrain.insert(out.pretrain.end(), api_pairs.begin(), api_pairs.end());
    return out;
}

std::vector<std::string> find_leakage(const std::vector<NLCodePair>& pretrain,
                                      const std::vector<NLCodePair>& dev,
                                      const std::vector<NLCodePair>& test) {
    std::unordered_set<std::string_view> held_out;
    for (const auto& p : dev) held_out.insert(p.pair_id);
    for (const auto& p : test) held_out.insert(p.pair_id);

    std::vector<std::string> leaked;
    std::unordered_set<std::string_view> reported;
    for (const auto& p : pretrain)
        if (held_out.count(p.pair_id) && reported.insert(p.pair_id).second)
            leaked.push_back(p.pair_id);
    std::sort(leaked.begin(), leaked.end());
    return leaked;
}

} // namespace nlcorpus::corpus
