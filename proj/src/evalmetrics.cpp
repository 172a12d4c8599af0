#include "nlcorpus/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "nlcorpus/errors.hpp"
#include "nlcorpus/util.hpp"

namespace nlcorpus::evalmetrics {

namespace {

const std::unordered_set<std::string_view>& python_keywords() {
    static const std::unordered_set<std::string_view> kw = {
        "False", "None",   "True",  "and",      "as",     "assert", "async",  "await",
        "break", "class",  "continue", "def",   "del",    "elif",   "else",   "except",
        "finally", "for",  "from",  "global",   "if",     "import", "in",     "is",
        "lambda", "nonlocal", "not", "or",      "pass",   "raise",  "return", "try",
        "while", "with",   "yield"};
    return kw;
}

bool is_string_prefix(std::string_view run) {
    if (run.empty() || run.size() > 2) return false;
    return std::all_of(run.begin(), run.end(), [](char c) {
        c = ascii_lower(c);
        return c == 'r' || c == 'b' || c == 'u' || c == 'f';
    });
}

// Replaces string literals (and their r/b/u/f prefixes) with spaces so the
// identifier scans below never see literal content.
std::string strip_string_literals(std::string_view code) {
    std::string out(code);
    std::size_t i = 0;
    while (i < out.size()) {
        char c = out[i];
        if (c != '\'' && c != '"') {
            ++i;
            continue;
        }
        std::size_t start = i;
        // absorb a prefix like r'' / rb"" when it is a standalone word run
        std::size_t p = i;
        while (p > 0 && is_word_char(out[p - 1])) --p;
        if (p < i && (p == 0 || !is_word_char(out[p - 1])) &&
            is_string_prefix(std::string_view(out).substr(p, i - p)))
            start = p;
        std::size_t j = i + 1;
        while (j < out.size()) {
            if (out[j] == '\\' && j + 1 < out.size()) {
                j += 2;
                continue;
            }
            if (out[j] == c) break;
            ++j;
        }
        std::size_t end = j < out.size() ? j + 1 : out.size();
        for (std::size_t t = start; t < end; ++t) out[t] = ' ';
        i = end;
    }
    return out;
}

} // namespace

std::vector<std::string> bleu_tokenize(std::string_view code) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < code.size()) {
        char c = code[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '\'' || c == '"') {
            std::size_t j = i + 1;
            while (j < code.size()) {
                if (code[j] == '\\' && j + 1 < code.size()) {
                    j += 2;
                    continue;
                }
                if (code[j] == c) break;
                ++j;
            }
            std::size_t end = j < code.size() ? j + 1 : code.size();
            tokens.emplace_back(code.substr(i, end - i));
            i = end;
            continue;
        }
        std::size_t start = i;
        if (is_word_char(c)) {
            while (i < code.size() && is_word_char(code[i])) ++i;
        } else {
            while (i < code.size() && !is_word_char(code[i]) && code[i] != '\'' &&
                   code[i] != '"' && !std::isspace(static_cast<unsigned char>(code[i])))
                ++i;
        }
        tokens.emplace_back(code.substr(start, i - start));
    }
    return tokens;
}

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

void count_ngrams(const std::vector<std::string>& tokens, std::size_t n, NgramCounts& out) {
    if (tokens.size() < n) return;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key;
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) key += '\x1f';
            key += tokens[i + j];
        }
        ++out[key];
    }
}

} // namespace

double corpus_bleu(const std::vector<std::string>& hypotheses,
                   const std::vector<std::string>& references) {
    if (hypotheses.size() != references.size())
        throw LengthMismatch("hypothesis/reference counts differ: " +
                             std::to_string(hypotheses.size()) + " vs " +
                             std::to_string(references.size()));
    if (hypotheses.empty()) throw EmptyCorpus("BLEU needs at least one sentence pair");

    constexpr std::size_t kOrder = 4;
    std::size_t matches[kOrder] = {0, 0, 0, 0};
    std::size_t totals[kOrder] = {0, 0, 0, 0};
    std::size_t hyp_len = 0, ref_len = 0;

    for (std::size_t s = 0; s < hypotheses.size(); ++s) {
        std::vector<std::string> hyp = bleu_tokenize(hypotheses[s]);
        std::vector<std::string> ref = bleu_tokenize(references[s]);
        hyp_len += hyp.size();
        ref_len += ref.size();
        for (std::size_t n = 1; n <= kOrder; ++n) {
            NgramCounts hyp_counts, ref_counts;
            count_ngrams(hyp, n, hyp_counts);
            count_ngrams(ref, n, ref_counts);
            for (const auto& [gram, count] : hyp_counts) {
                totals[n - 1] += count;
                auto it = ref_counts.find(gram);
                if (it != ref_counts.end()) matches[n - 1] += std::min(count, it->second);
            }
        }
    }

    // Orders with no hypothesis n-grams at all (corpus shorter than n) drop
    // out of the geometric mean; a zero match count against a non-zero total
    // is a genuine zero precision and scores 0, unsmoothed.
    double log_precision = 0.0;
    std::size_t orders = 0;
    for (std::size_t n = 0; n < kOrder; ++n) {
        if (totals[n] == 0) continue;
        if (matches[n] == 0) return 0.0;
        log_precision += std::log(static_cast<double>(matches[n]) / static_cast<double>(totals[n]));
        ++orders;
    }
    if (orders == 0) return 0.0;  // every hypothesis tokenized to nothing
    double brevity = 1.0;
    if (hyp_len < ref_len)
        brevity = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
    return 100.0 * brevity * std::exp(log_precision / static_cast<double>(orders));
}

std::set<std::string> extract_api_tokens(std::string_view snippet) {
    std::string code = strip_string_literals(snippet);
    std::set<std::string> out;
    std::size_t i = 0;
    while (i < code.size()) {
        char c = code[i];
        char prev = i > 0 ? code[i - 1] : ' ';
        bool dotted_root = c == '.' && !is_word_char(prev) && i + 1 < code.size() &&
                           is_ident_start(code[i + 1]);
        bool ident_root = is_ident_start(c) && !is_word_char(prev) && prev != '.';
        if (!dotted_root && !ident_root) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (dotted_root) ++i;
        std::size_t components = 0;
        while (i < code.size() && is_ident_start(code[i])) {
            while (i < code.size() && is_word_char(code[i])) ++i;
            ++components;
            if (i + 1 < code.size() && code[i] == '.' && is_ident_start(code[i + 1]))
                ++i;
            else
                break;
        }
        std::string name(code.substr(start, i - start));
        if (i < code.size() && code[i] == '(') {
            bool keyword = !dotted_root && components == 1 && python_keywords().count(name);
            if (!keyword) out.insert(std::move(name));
        }
    }
    return out;
}

std::set<std::string> extract_variable_tokens(std::string_view snippet) {
    std::string code = strip_string_literals(snippet);

    // spans covered by call-head chains (the extract_api_tokens scan)
    std::vector<bool> in_call(code.size(), false);
    std::size_t i = 0;
    while (i < code.size()) {
        char c = code[i];
        char prev = i > 0 ? code[i - 1] : ' ';
        bool dotted_root = c == '.' && !is_word_char(prev) && i + 1 < code.size() &&
                           is_ident_start(code[i + 1]);
        bool ident_root = is_ident_start(c) && !is_word_char(prev) && prev != '.';
        if (!dotted_root && !ident_root) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (dotted_root) ++i;
        while (i < code.size() && is_ident_start(code[i])) {
            while (i < code.size() && is_word_char(code[i])) ++i;
            if (i + 1 < code.size() && code[i] == '.' && is_ident_start(code[i + 1]))
                ++i;
            else
                break;
        }
        if (i < code.size() && code[i] == '(')
            for (std::size_t t = start; t < i; ++t) in_call[t] = true;
    }

    std::set<std::string> out;
    i = 0;
    while (i < code.size()) {
        if (!is_ident_start(code[i]) || (i > 0 && is_word_char(code[i - 1]))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < code.size() && is_word_char(code[i])) ++i;
        if (in_call[start]) continue;
        std::string name(code.substr(start, i - start));
        if (!python_keywords().count(name)) out.insert(std::move(name));
    }
    return out;
}

double token_accuracy(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                      TokenKind kind) {
    if (hyps.size() != refs.size())
        throw LengthMismatch("hypothesis/reference counts differ: " + std::to_string(hyps.size()) +
                             " vs " + std::to_string(refs.size()));
    auto extract = kind == TokenKind::api_call ? extract_api_tokens : extract_variable_tokens;

    double sum = 0.0;
    std::size_t eligible = 0;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
        std::set<std::string> ref_tokens = extract(refs[i]);
        if (ref_tokens.empty()) continue;
        std::set<std::string> hyp_tokens = extract(hyps[i]);
        std::size_t inter = 0;
        for (const auto& t : ref_tokens) inter += hyp_tokens.count(t);
        sum += static_cast<double>(inter) / static_cast<double>(std::max<std::size_t>(1, ref_tokens.size()));
        ++eligible;
    }
    return eligible == 0 ? 0.0 : sum / static_cast<double>(eligible);
}

std::vector<std::size_t> rank_by_api_frequency(const std::vector<NLCodePair>& test_pairs,
                                               const std::vector<NLCodePair>& api_stats_source) {
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& p : api_stats_source)
        for (const auto& name : extract_api_tokens(p.snippet)) ++freq[name];

    std::vector<double> score(test_pairs.size(), 0.0);
    for (std::size_t i = 0; i < test_pairs.size(); ++i) {
        std::set<std::string> apis = extract_api_tokens(test_pairs[i].snippet);
        if (apis.empty()) continue;
        double total = 0.0;
        for (const auto& name : apis) {
            auto it = freq.find(name);
            total += it == freq.end() ? 0.0 : static_cast<double>(it->second);
        }
        score[i] = total / static_cast<double>(apis.size());
    }

    std::vector<std::size_t> order(test_pairs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    return order;
}

std::map<std::string, SplitBleu> frequency_split(
    const std::vector<NLCodePair>& test_pairs,
    const std::map<std::string, std::vector<std::string>>& hyp_sets,
    const std::vector<NLCodePair>& api_stats_source, std::size_t top_n, std::size_t bottom_n) {
    if (top_n + bottom_n > test_pairs.size())
        throw InsufficientInstances("need " + std::to_string(top_n + bottom_n) +
                                    " instances for the split, have " +
                                    std::to_string(test_pairs.size()));
    for (const auto& [name, hyps] : hyp_sets)
        if (hyps.size() != test_pairs.size())
            throw LengthMismatch("hypothesis set " + name + " has " + std::to_string(hyps.size()) +
                                 " entries, expected " + std::to_string(test_pairs.size()));

    std::vector<std::size_t> order = rank_by_api_frequency(test_pairs, api_stats_source);

    auto subset_refs = [&](std::size_t from, std::size_t count) {
        std::vector<std::string> refs;
        refs.reserve(count);
        for (std::size_t i = from; i < from + count; ++i)
            refs.push_back(test_pairs[order[i]].snippet);
        return refs;
    };
    auto subset_hyps = [&](const std::vector<std::string>& hyps, std::size_t from, std::size_t count) {
        std::vector<std::string> out;
        out.reserve(count);
        for (std::size_t i = from; i < from + count; ++i) out.push_back(hyps[order[i]]);
        return out;
    };

    std::vector<std::string> top_refs = subset_refs(0, top_n);
    std::vector<std::string> bottom_refs = subset_refs(test_pairs.size() - bottom_n, bottom_n);

    std::map<std::string, SplitBleu> out;
    for (const auto& [name, hyps] : hyp_sets) {
        SplitBleu sb;
        sb.high_freq = corpus_bleu(subset_hyps(hyps, 0, top_n), top_refs);
        sb.low_freq =
            corpus_bleu(subset_hyps(hyps, test_pairs.size() - bottom_n, bottom_n), bottom_refs);
        out.emplace(name, sb);
    }
    return out;
}

} // namespace nlcorpus::evalmetrics
