#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nlcorpus/pair.hpp"

namespace nlcorpus::evalmetrics {

// Surface tokenizer for BLEU: string literals are single tokens, identifier
// and punctuation runs split at word/non-word boundaries. Distinct from the
// retrieval tokenizer, which drops punctuation.
std::vector<std::string> bleu_tokenize(std::string_view code);

// Corpus-level BLEU-4 in [0,100]: corpus-aggregated clipped n-gram counts,
// uniform weights, one brevity penalty, no smoothing (a zero n-gram overlap
// total scores 0). Orders the hypothesis corpus is too short to populate
// drop out of the geometric mean, so BLEU(x,x) = 100 on any non-empty
// corpus. Throws LengthMismatch / EmptyCorpus.
double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references);

// Dotted identifier chains immediately followed by '(' after string-literal
// stripping; chains rooted at a non-identifier receiver keep a leading dot
// (e.g. ".lower").
std::set<std::string> extract_api_tokens(std::string_view snippet);

// Identifiers that are not call-head components, keywords, or literals.
std::set<std::string> extract_variable_tokens(std::string_view snippet);

enum class TokenKind { api_call, variable };

// Mean over pairs with a non-empty reference extraction of
// |extract(hyp) n extract(ref)| / |extract(ref)|. Reports 0 when no pair
// has a non-empty reference extraction.
double token_accuracy(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                      TokenKind kind);

struct SplitBleu {
    double high_freq = 0.0;
    double low_freq = 0.0;
};

struct EvalReport {
    double corpus_bleu = 0.0;
    double api_token_accuracy = 0.0;
    double var_token_accuracy = 0.0;
    std::optional<std::map<std::string, SplitBleu>> split_bleu;
};

// Instance order by descending mean corpus-wide usage frequency of the
// instance's extracted API calls (ties keep input order).
std::vector<std::size_t> rank_by_api_frequency(const std::vector<NLCodePair>& test_pairs,
                                               const std::vector<NLCodePair>& api_stats_source);

// BLEU on the top-N and bottom-N instances by API usage frequency, per named
// hypothesis set. Throws InsufficientInstances when top_n + bottom_n exceeds
// the instance count, LengthMismatch on misaligned hypothesis lists.
std::map<std::string, SplitBleu> frequency_split(
    const std::vector<NLCodePair>& test_pairs,
    const std::map<std::string, std::vector<std::string>>& hyp_sets,
    const std::vector<NLCodePair>& api_stats_source, std::size_t top_n = 200,
    std::size_t bottom_n = 200);

} // namespace nlcorpus::evalmetrics
