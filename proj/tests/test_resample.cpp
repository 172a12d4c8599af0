#include <doctest.h>

#include <cmath>
#include <map>

#include "nlcorpus/resample.hpp"
#include "bm25_oracle.hpp"
#include "support.hpp"

using namespace nlcorpus;
using namespace nlcorpus::resample;

namespace {

FreqTable table_of(std::map<std::string, std::int64_t> counts, std::size_t queries = 0) {
    FreqTable t;
    t.counts = std::move(counts);
    t.total_queries = queries;
    return t;
}

double entropy(const std::map<std::string, double>& p) {
    double h = 0.0;
    for (const auto& [id, prob] : p)
        if (prob > 0.0) h -= prob * std::log(prob);
    return h;
}

std::vector<NLCodePair> three_pairs() {
    return {NLCodePair::make("first intent", "first.call()", Source::api),
            NLCodePair::make("second intent", "second.call()", Source::api),
            NLCodePair::make("third intent", "third.call()", Source::api)};
}

} // namespace

TEST_CASE("aggregate_freq: empty queries give all-zero counts") {
    auto pairs = three_pairs();
    auto index = retrieval::Bm25Index::build(pairs, retrieval::Target::intent);
    FreqTable t = aggregate_freq({}, index, 1);
    CHECK(t.total_queries == 0);
    CHECK(t.counts.size() == 3);
    for (const auto& [id, c] : t.counts) CHECK(c == 0);
}

TEST_CASE("aggregate_freq: k=1 with a single dominant target") {
    auto pairs = three_pairs();
    auto index = retrieval::Bm25Index::build(pairs, retrieval::Target::intent);
    std::vector<NLCodePair> queries;
    for (int i = 0; i < 7; ++i)
        queries.push_back(NLCodePair::make("second intent please", "q" + std::to_string(i),
                                           Source::annotated));
    FreqTable t = aggregate_freq(queries, index, 1);
    CHECK(t.counts.at(pairs[1].pair_id) == 7);
    CHECK(t.counts.at(pairs[0].pair_id) == 0);
    CHECK(t.counts.at(pairs[2].pair_id) == 0);

    // delta semantics: counts never exceed |queries| at k=1
    std::int64_t total = 0;
    for (const auto& [id, c] : t.counts) total += c;
    CHECK(total <= static_cast<std::int64_t>(queries.size()));
}

TEST_CASE("aggregate_freq: oracle recount on 200 queries at k=3") {
    testsupport::SynthFixture api = testsupport::make_synth_fixture(30, 0, 11);
    testsupport::SynthFixture qsrc = testsupport::make_synth_fixture(0, 200, 12);
    auto index = retrieval::Bm25Index::build(api.pairs, retrieval::Target::intent);

    std::vector<NLCodePair> queries;
    for (std::size_t i = 0; i < qsrc.queries.size(); ++i)
        queries.push_back(
            NLCodePair::make(qsrc.queries[i], "code" + std::to_string(i), Source::mined));

    FreqTable t = aggregate_freq(queries, index, 3);

    std::map<std::string, std::int64_t> expected;
    for (const auto& id : index.doc_ids()) expected[id] = 0;
    for (const auto& q : queries)
        for (const auto& hit :
             testsupport::brute_force_bm25(api.pairs, retrieval::Target::intent, q.intent, 3))
            ++expected[hit.doc_id];
    CHECK(t.counts == expected);
}

TEST_CASE("smooth: tau=1 is proportional, tau=2 is square root") {
    auto p1 = smooth(table_of({{"a", 2}, {"b", 1}, {"c", 1}}), 1.0);
    CHECK(p1.at("a") == doctest::Approx(0.5));
    CHECK(p1.at("b") == doctest::Approx(0.25));
    CHECK(p1.at("c") == doctest::Approx(0.25));

    auto p2 = smooth(table_of({{"a", 4}, {"b", 1}}), 2.0);
    CHECK(p2.at("a") == doctest::Approx(2.0 / 3.0));
    CHECK(p2.at("b") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("smooth: huge tau approaches uniform over the support") {
    auto p = smooth(table_of({{"a", 5}, {"b", 3}, {"c", 2}, {"d", 0}}), 1e9);
    CHECK(p.at("a") == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK(p.at("b") == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK(p.at("c") == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK(p.at("d") == 0.0);

    auto u = smooth(table_of({{"a", 5}, {"b", 3}, {"c", 2}, {"d", 0}}), 1.0, true);
    CHECK(u.at("a") == doctest::Approx(1.0 / 3.0));
    CHECK(u.at("d") == 0.0);
}

TEST_CASE("smooth: all-zero frequencies fail") {
    CHECK_THROWS_AS(smooth(table_of({{"a", 0}, {"b", 0}}), 2.0), AllZeroFrequencies);
}

TEST_CASE("smooth: normalization and order preservation") {
    FreqTable t = table_of({{"a", 17}, {"b", 5}, {"c", 5}, {"d", 1}, {"e", 0}});
    for (double tau : {1.0, 2.0, 5.0, 50.0}) {
        auto p = smooth(t, tau);
        double sum = 0.0;
        for (const auto& [id, prob] : p) {
            CHECK(prob >= 0.0);
            sum += prob;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p.at("a") > p.at("b"));
        CHECK(p.at("b") == doctest::Approx(p.at("c")).epsilon(1e-12));
        CHECK(p.at("c") > p.at("d"));
        CHECK(p.at("e") == 0.0);
    }
}

TEST_CASE("smooth: entropy is non-decreasing in tau") {
    FreqTable t = table_of({{"a", 100}, {"b", 10}, {"c", 3}, {"d", 1}});
    double last = -1.0;
    for (double tau : {1.0, 2.0, 5.0, 1e9}) {
        double h = entropy(smooth(t, tau));
        CHECK(h >= last - 1e-12);
        last = h;
    }
}

TEST_CASE("sample_dist: point mass and determinism") {
    auto pairs = three_pairs();
    ResamplePlan plan;
    plan.sample_size = 25;
    plan.seed = 99;
    plan.probabilities = {{pairs[0].pair_id, 1.0}, {pairs[1].pair_id, 0.0}, {pairs[2].pair_id, 0.0}};
    auto sample = sample_dist(plan, pairs);
    REQUIRE(sample.size() == 25);
    for (const auto& p : sample) CHECK(p.pair_id == pairs[0].pair_id);

    plan.probabilities = {{pairs[0].pair_id, 0.2}, {pairs[1].pair_id, 0.5}, {pairs[2].pair_id, 0.3}};
    auto a = sample_dist(plan, pairs);
    auto b = sample_dist(plan, pairs);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].pair_id == b[i].pair_id);

    plan.seed = 100;
    auto c = sample_dist(plan, pairs);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) any_diff |= a[i].pair_id != c[i].pair_id;
    CHECK(any_diff);
}

TEST_CASE("sample_dist: 10000 draws land near the target distribution") {
    auto pairs = three_pairs();
    ResamplePlan plan;
    plan.sample_size = 10000;
    plan.seed = 20260811;
    plan.probabilities = {
        {pairs[0].pair_id, 0.5}, {pairs[1].pair_id, 0.25}, {pairs[2].pair_id, 0.25}};
    auto sample = sample_dist(plan, pairs);
    std::map<std::string, double> freq;
    for (const auto& p : sample) freq[p.pair_id] += 1.0 / 10000.0;
    CHECK(freq[pairs[0].pair_id] == doctest::Approx(0.5).epsilon(0.04));
    CHECK(std::abs(freq[pairs[0].pair_id] - 0.5) <= 0.02);
    CHECK(std::abs(freq[pairs[1].pair_id] - 0.25) <= 0.02);
    CHECK(std::abs(freq[pairs[2].pair_id] - 0.25) <= 0.02);
}

TEST_CASE("sample_dist: no mass fails") {
    auto pairs = three_pairs();
    ResamplePlan plan;
    plan.sample_size = 5;
    plan.probabilities = {};
    CHECK_THROWS_AS(sample_dist(plan, pairs), AllZeroFrequencies);
}

TEST_CASE("sample_direct: single query returns its hits in rank order") {
    testsupport::SynthFixture api = testsupport::make_synth_fixture(25, 0, 77);
    auto index = retrieval::Bm25Index::build(api.pairs, retrieval::Target::intent);
    std::vector<NLCodePair> queries = {
        NLCodePair::make("file open read write list", "q0", Source::annotated)};
    auto got = sample_direct(queries, index, api.pairs, 5);
    auto expected = testsupport::brute_force_bm25(api.pairs, retrieval::Target::intent,
                                                  queries[0].intent, 5);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].pair_id == expected[i].doc_id);
}

TEST_CASE("sample_direct: duplicates across queries are retained") {
    auto pairs = three_pairs();
    auto index = retrieval::Bm25Index::build(pairs, retrieval::Target::intent);
    std::vector<NLCodePair> queries = {
        NLCodePair::make("first second third intent", "q0", Source::annotated),
        NLCodePair::make("first second third intent", "q1", Source::annotated)};
    auto got = sample_direct(queries, index, pairs, 5);
    CHECK(got.size() == 6);  // 3 positive-score hits per query, twice
    for (std::size_t i = 0; i < 3; ++i) CHECK(got[i].pair_id == got[i + 3].pair_id);
}

TEST_CASE("sample_direct: twenty query fixture matches the oracle concatenation") {
    testsupport::SynthFixture api = testsupport::make_synth_fixture(40, 0, 8);
    testsupport::SynthFixture qsrc = testsupport::make_synth_fixture(0, 20, 9);
    auto index = retrieval::Bm25Index::build(api.pairs, retrieval::Target::intent);
    std::vector<NLCodePair> queries;
    for (std::size_t i = 0; i < qsrc.queries.size(); ++i)
        queries.push_back(NLCodePair::make(qsrc.queries[i], "q" + std::to_string(i),
                                           Source::annotated));
    auto got = sample_direct(queries, index, api.pairs, 5);

    std::vector<std::string> expected;
    for (const auto& q : queries)
        for (const auto& hit :
             testsupport::brute_force_bm25(api.pairs, retrieval::Target::intent, q.intent, 5))
            expected.push_back(hit.doc_id);
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].pair_id == expected[i]);
}

TEST_CASE("plan files round trip") {
    testsupport::TempDir dir("plan");
    ResamplePlan plan;
    plan.k = 3;
    plan.tau = 5.0;
    plan.target = retrieval::Target::intent;
    plan.strategy = Strategy::direct;
    plan.sample_size = 1234;
    plan.seed = 42;
    save_plan(plan, dir / "plan.json");
    ResamplePlan loaded = load_plan(dir / "plan.json");
    CHECK(loaded.k == 3);
    CHECK(loaded.tau == doctest::Approx(5.0));
    CHECK(loaded.tau_uniform == false);
    CHECK(loaded.target == retrieval::Target::intent);
    CHECK(loaded.strategy == Strategy::direct);
    CHECK(loaded.sample_size == 1234);
    CHECK(loaded.seed == 42);

    plan.tau_uniform = true;
    save_plan(plan, dir / "plan_inf.json");
    CHECK(load_plan(dir / "plan_inf.json").tau_uniform);
}

TEST_CASE("write_freq_tsv emits one row per pair") {
    testsupport::TempDir dir("tsv");
    write_freq_tsv(table_of({{"idb", 3}, {"ida", 7}, {"idc", 0}}), dir / "freq.tsv");
    std::string tsv = testsupport::read_file(dir / "freq.tsv");
    CHECK(tsv == "pair_id\tcount\nida\t7\nidb\t3\nidc\t0\n");
}
