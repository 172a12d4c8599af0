#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nlcorpus/pair.hpp"
#include "nlcorpus/retrieval.hpp"

namespace nlcorpus::resample {

enum class Strategy { dist, direct };

Strategy strategy_from_string(std::string_view s);
std::string_view to_string(Strategy s);

// Retrieval frequency table over the API pair set: counts[y] is the number
// of query pairs whose top-k retrieval contained y. Ids never retrieved are
// present with count 0.
struct FreqTable {
    std::map<std::string, std::int64_t> counts;
    std::size_t total_queries = 0;
};

struct ResamplePlan {
    int k = 1;
    double tau = 2.0;
    bool tau_uniform = false;  // represents tau = infinity
    retrieval::Target target = retrieval::Target::code;
    Strategy strategy = Strategy::dist;
    std::size_t sample_size = 0;  // 0: resolve to |D_API| at run time
    std::uint64_t seed = 0;
    std::map<std::string, double> probabilities;  // dist strategy only
};

ResamplePlan load_plan(const std::filesystem::path& path);
void save_plan(const ResamplePlan& plan, const std::filesystem::path& path);

// freq(y) = sum over queries x of [y in top-k retrieval for x]. The query
// text is the intent or snippet according to the index target.
FreqTable aggregate_freq(const std::vector<NLCodePair>& queries,
                         const retrieval::Bm25Index& api_index, int k);

// P(y) proportional to freq(y)^(1/tau); zero frequencies stay at zero.
// uniform=true gives the tau -> infinity limit: equal mass on the support.
// Throws AllZeroFrequencies when no count is positive.
std::map<std::string, double> smooth(const FreqTable& freq, double tau, bool uniform = false);

// sample_size i.i.d. draws (with replacement) from plan.probabilities using
// a seeded mt19937_64; output order is draw order.
std::vector<NLCodePair> sample_dist(const ResamplePlan& plan,
                                    const std::vector<NLCodePair>& api_pairs);

// Per-query top-k concatenation, duplicates retained, query order then rank
// order.
std::vector<NLCodePair> sample_direct(const std::vector<NLCodePair>& queries,
                                      const retrieval::Bm25Index& api_index,
                                      const std::vector<NLCodePair>& api_pairs, int k = 5);

void write_freq_tsv(const FreqTable& freq, const std::filesystem::path& path);

} // namespace nlcorpus::resample
