#include "nlcorpus/resample.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_map>

#include <json.hpp>

#include "nlcorpus/errors.hpp"
#include "nlcorpus/util.hpp"

namespace nlcorpus::resample {

Strategy strategy_from_string(std::string_view s) {
    if (s == "dist") return Strategy::dist;
    if (s == "direct") return Strategy::direct;
    throw Error("unknown resample strategy: " + std::string(s));
}

std::string_view to_string(Strategy s) {
    return s == Strategy::dist ? "dist" : "direct";
}

ResamplePlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open plan file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoFailure("cannot parse plan file " + path.string() + ": " + e.what());
    }
    ResamplePlan plan;
    plan.k = j.value("k", plan.k);
    if (j.contains("tau")) {
        if (j["tau"].is_string()) {
            if (j["tau"] != "inf") throw ConfigError("plan tau must be a number or \"inf\"");
            plan.tau_uniform = true;
        } else {
            plan.tau = j["tau"].get<double>();
        }
    }
    if (j.contains("target")) plan.target = retrieval::target_from_string(j["target"].get<std::string>());
    if (j.contains("strategy")) plan.strategy = strategy_from_string(j["strategy"].get<std::string>());
    plan.sample_size = j.value("sample_size", plan.sample_size);
    plan.seed = j.value("seed", plan.seed);
    if (plan.k < 1) throw ConfigError("plan k must be >= 1");
    if (!plan.tau_uniform && plan.tau < 1.0) throw ConfigError("plan tau must be >= 1");
    return plan;
}

void save_plan(const ResamplePlan& plan, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["k"] = plan.k;
    if (plan.tau_uniform)
        j["tau"] = "inf";
    else
        j["tau"] = plan.tau;
    j["target"] = std::string(retrieval::to_string(plan.target));
    j["strategy"] = std::string(to_string(plan.strategy));
    j["sample_size"] = plan.sample_size;
    j["seed"] = plan.seed;
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write plan file " + path.string());
    out << j.dump(2) << "\n";
}

FreqTable aggregate_freq(const std::vector<NLCodePair>& queries,
                         const retrieval::Bm25Index& api_index, int k) {
    if (k < 1) throw Error("aggregate_freq requires k >= 1");
    FreqTable table;
    for (const auto& id : api_index.doc_ids()) table.counts[id] = 0;
    table.total_queries = queries.size();
    for (const auto& query : queries) {
        const std::string& text =
            api_index.target() == retrieval::Target::intent ? query.intent : query.snippet;
        for (const auto& hit : api_index.search(text, static_cast<std::size_t>(k)))
            ++table.counts[hit.doc_id];
    }
    return table;
}

std::map<std::string, double> smooth(const FreqTable& freq, double tau, bool uniform) {
    if (!uniform && tau < 1.0) throw Error("smoothing temperature must be >= 1");

    double total = 0.0;
    std::map<std::string, double> weights;
    for (const auto& [id, count] : freq.counts) {
        double w = 0.0;
        if (count > 0) {
            if (uniform)
                w = 1.0;
            else if (tau == 1.0)
                w = static_cast<double>(count);  // proportional case stays exact
            else
                w = std::pow(static_cast<double>(count), 1.0 / tau);
        }
        weights.emplace(id, w);
        total += w;
    }
    if (total <= 0.0) throw AllZeroFrequencies("every retrieval frequency is zero");
    for (auto& [id, w] : weights) w /= total;
    return weights;
}

std::vector<NLCodePair> sample_dist(const ResamplePlan& plan,
                                    const std::vector<NLCodePair>& api_pairs) {
    // Cumulative distribution in api_pairs order; draws use the top 53 bits
    // of mt19937_64 so results are identical on every platform.
    std::vector<double> cumulative;
    cumulative.reserve(api_pairs.size());
    double total = 0.0;
    for (const auto& p : api_pairs) {
        auto it = plan.probabilities.find(p.pair_id);
        total += it == plan.probabilities.end() ? 0.0 : it->second;
        cumulative.push_back(total);
    }
    if (total <= 0.0) throw AllZeroFrequencies("sampling distribution has no mass");

    std::mt19937_64 rng(plan.seed);
    constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

    std::vector<NLCodePair> out;
    out.reserve(plan.sample_size);
    for (std::size_t i = 0; i < plan.sample_size; ++i) {
        double u = static_cast<double>(rng() >> 11) * kInv53;
        double x = u * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
        std::size_t idx = it == cumulative.end()
                              ? cumulative.size() - 1
                              : static_cast<std::size_t>(it - cumulative.begin());
        out.push_back(api_pairs[idx]);
    }
    return out;
}

std::vector<NLCodePair> sample_direct(const std::vector<NLCodePair>& queries,
                                      const retrieval::Bm25Index& api_index,
                                      const std::vector<NLCodePair>& api_pairs, int k) {
    if (k < 1) throw Error("sample_direct requires k >= 1");
    std::unordered_map<std::string_view, const NLCodePair*> by_id;
    by_id.reserve(api_pairs.size());
    for (const auto& p : api_pairs) by_id.emplace(p.pair_id, &p);

    std::vector<NLCodePair> out;
    for (const auto& query : queries) {
        const std::string& text =
            api_index.target() == retrieval::Target::intent ? query.intent : query.snippet;
        for (const auto& hit : api_index.search(text, static_cast<std::size_t>(k))) {
            auto it = by_id.find(hit.doc_id);
            if (it == by_id.end()) throw Error("index doc " + hit.doc_id + " missing from api pairs");
            out.push_back(*it->second);
        }
    }
    return out;
}

void write_freq_tsv(const FreqTable& freq, const std::filesystem::path& path) {
    // descending count, ties by id, for easy inspection
    std::vector<std::pair<std::string, std::int64_t>> rows(freq.counts.begin(), freq.counts.end());
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot write frequency table " + path.string());
    out << "pair_id\tcount\n";
    for (const auto& [id, count] : rows) out << id << "\t" << count << "\n";
    if (!out.good()) throw IoFailure("failed while writing frequency table " + path.string());
}

} // namespace nlcorpus::resample
