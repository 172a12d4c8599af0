#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nlcorpus/pair.hpp"

namespace nlcorpus::corpus {

enum class SplitName { train, dev, test };

struct CorpusSplit {
    SplitName name = SplitName::train;
    std::vector<NLCodePair> pairs;
};

enum class StrategyLabel { man, man_mine, man_mine_api };
enum class ApiSource { none, raw, direct, dist };

StrategyLabel label_from_string(std::string_view s);
std::string_view to_string(StrategyLabel label);
ApiSource api_source_from_string(std::string_view s);
std::string_view to_string(ApiSource src);

struct DataStrategy {
    StrategyLabel label = StrategyLabel::man;
    std::size_t mined_top_k = 100000;
    ApiSource api_source = ApiSource::none;
};

struct LoadResult {
    std::vector<NLCodePair> pairs;
    std::vector<std::size_t> malformed_lines;
};

// Reads a JSONL pair file (or a whole-file JSON array, the upstream CoNaLa
// layout) and tags every pair with `source`. rewritten_intent is preferred
// over intent when present; pair_id is recomputed when absent. Malformed
// records are skipped and reported; more than 1% malformed fails the load.
LoadResult load_pairs(const std::filesystem::path& path, Source source);

// Same reader, but each record's own source field wins (api when absent).
// Used where the caller summarizes a file rather than tagging it.
LoadResult load_pairs_untagged(const std::filesystem::path& path);

void save_pairs(const std::vector<NLCodePair>& pairs, const std::filesystem::path& path);

// Descending confidence, ties by pair_id, truncated to top_k. Throws
// MissingConfidence when a pair has no confidence score.
std::vector<NLCodePair> select_top_mined(std::vector<NLCodePair> mined, std::size_t top_k);

struct AssembledCorpus {
    std::vector<NLCodePair> pretrain;
    std::vector<NLCodePair> finetune;
};

// man: fine-tune only. man_mine: pre-train on top-k mined. man_mine_api:
// pre-train on top-k mined followed by the API pairs (raw harvest, direct
// retrieval, or dist sample per the strategy's api_source).
AssembledCorpus assemble(const DataStrategy& strategy, const std::vector<NLCodePair>& ann_train,
                         const std::vector<NLCodePair>& mined,
                         const std::vector<NLCodePair>& api_pairs);

// pair_ids present in pretrain and in dev or test; empty means no leakage.
std::vector<std::string> find_leakage(const std::vector<NLCodePair>& pretrain,
                                      const std::vector<NLCodePair>& dev,
                                      const std::vector<NLCodePair>& test);

} // namespace nlcorpus::corpus
