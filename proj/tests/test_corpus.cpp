#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "nlcorpus/corpus.hpp"
#include "support.hpp"

using namespace nlcorpus;
using namespace nlcorpus::corpus;

namespace {

NLCodePair mined_pair(const std::string& tag, double confidence) {
    return NLCodePair::make("intent " + tag, "code(" + tag + ")", Source::mined, confidence);
}

} // namespace

TEST_CASE("load_pairs: plain JSONL") {
    testsupport::TempDir dir("load");
    testsupport::write_file(dir / "pairs.jsonl",
                            "{\"intent\": \"a\", \"snippet\": \"x()\"}\n"
                            "{\"intent\": \"b\", \"snippet\": \"y()\"}\n"
                            "{\"intent\": \"c\", \"snippet\": \"z()\"}\n");
    LoadResult r = load_pairs(dir / "pairs.jsonl", Source::annotated);
    CHECK(r.pairs.size() == 3);
    CHECK(r.malformed_lines.empty());
    CHECK(r.pairs[0].source == Source::annotated);
    CHECK(r.pairs[0].pair_id == compute_pair_id("a", "x()"));
}

TEST_CASE("load_pairs: malformed lines are skipped and reported") {
    testsupport::TempDir dir("load");
    std::string content;
    for (int i = 0; i < 150; ++i)
        content += "{\"intent\": \"i" + std::to_string(i) + "\", \"snippet\": \"s()\"}\n";
    content += "this is not json\n";
    testsupport::write_file(dir / "pairs.jsonl", content);
    LoadResult r = load_pairs(dir / "pairs.jsonl", Source::api);
    CHECK(r.pairs.size() == 150);
    CHECK(r.malformed_lines == std::vector<std::size_t>{151});
}

TEST_CASE("load_pairs: more than one percent malformed fails") {
    testsupport::TempDir dir("load");
    std::string content = "{\"intent\": \"a\", \"snippet\": \"x()\"}\n";
    content += "broken\n";
    testsupport::write_file(dir / "pairs.jsonl", content);
    CHECK_THROWS_AS(load_pairs(dir / "pairs.jsonl", Source::api), MalformedRecord);
}

TEST_CASE("load_pairs: missing file") {
    CHECK_THROWS_AS(load_pairs("/nonexistent/nowhere.jsonl", Source::api), IoFailure);
}

TEST_CASE("load_pairs: CoNaLa array format prefers rewritten_intent") {
    LoadResult r = load_pairs(testsupport::fixture("conala_sample.json"), Source::annotated);
    REQUIRE(r.pairs.size() == 10);
    CHECK(r.pairs[0].intent == "check if string `value` is a number");
    CHECK(r.pairs[2].intent == "reverse a string in python");  // null rewritten_intent
    CHECK(r.pairs[2].snippet == "s[::-1]");
    for (const auto& p : r.pairs) CHECK(!p.confidence.has_value());
}

TEST_CASE("load_pairs: mined records need confidence in range") {
    testsupport::TempDir dir("load");
    testsupport::write_file(dir / "mined.jsonl",
                            "{\"intent\": \"a\", \"snippet\": \"x()\", \"confidence\": 0.9}\n");
    LoadResult ok = load_pairs(dir / "mined.jsonl", Source::mined);
    CHECK(ok.pairs.at(0).confidence == 0.9);

    testsupport::write_file(dir / "bad.jsonl", "{\"intent\": \"a\", \"snippet\": \"x()\"}\n");
    CHECK_THROWS_AS(load_pairs(dir / "bad.jsonl", Source::mined), MalformedRecord);

    testsupport::write_file(dir / "range.jsonl",
                            "{\"intent\": \"a\", \"snippet\": \"x()\", \"confidence\": 1.5}\n");
    CHECK_THROWS_AS(load_pairs(dir / "range.jsonl", Source::mined), MalformedRecord);
}

TEST_CASE("save/load round trip is byte-stable") {
    testsupport::TempDir dir("save");
    std::vector<NLCodePair> pairs = {
        NLCodePair::make("quote \" and backslash \\", "call('a\\nb')", Source::api),
        NLCodePair::make("plain", "f(x)", Source::mined, 0.25),
    };
    save_pairs(pairs, dir / "a.jsonl");
    save_pairs(load_pairs(dir / "a.jsonl", Source::api).pairs, dir / "b.jsonl");
    // source tag is reapplied on load, so compare after normalizing source
    LoadResult a = load_pairs(dir / "a.jsonl", Source::api);
    LoadResult b = load_pairs(dir / "b.jsonl", Source::api);
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        CHECK(a.pairs[i].intent == b.pairs[i].intent);
        CHECK(a.pairs[i].snippet == b.pairs[i].snippet);
        CHECK(a.pairs[i].pair_id == b.pairs[i].pair_id);
    }
}

TEST_CASE("select_top_mined: sort and truncate") {
    std::vector<NLCodePair> mined = {mined_pair("a", 0.9), mined_pair("b", 0.5),
                                     mined_pair("c", 0.7)};
    auto top2 = select_top_mined(mined, 2);
    REQUIRE(top2.size() == 2);
    CHECK(top2[0].confidence == 0.9);
    CHECK(top2[1].confidence == 0.7);

    auto all = select_top_mined(mined, 10);
    CHECK(all.size() == 3);
    CHECK(all[2].confidence == 0.5);
}

TEST_CASE("select_top_mined: ties break on pair_id") {
    std::vector<NLCodePair> mined = {mined_pair("x", 0.5), mined_pair("y", 0.5),
                                     mined_pair("z", 0.5)};
    auto sorted1 = select_top_mined(mined, 3);
    std::reverse(mined.begin(), mined.end());
    auto sorted2 = select_top_mined(mined, 3);
    REQUIRE(sorted1.size() == sorted2.size());
    for (std::size_t i = 0; i < sorted1.size(); ++i)
        CHECK(sorted1[i].pair_id == sorted2[i].pair_id);
    CHECK(sorted1[0].pair_id < sorted1[1].pair_id);
}

TEST_CASE("select_top_mined: 600k pairs keep exactly the top 100k") {
    std::mt19937_64 rng(17);
    std::vector<NLCodePair> mined;
    mined.reserve(600000);
    for (std::size_t i = 0; i < 600000; ++i) {
        NLCodePair p;
        p.intent = "i";
        p.snippet = "s";
        p.source = Source::mined;
        p.confidence = static_cast<double>(rng() >> 11) / 9007199254740992.0;
        p.pair_id = "m" + std::to_string(i);
        mined.push_back(std::move(p));
    }
    auto top = select_top_mined(std::move(mined), 100000);
    REQUIRE(top.size() == 100000);
    for (std::size_t i = 1; i < top.size(); ++i)
        CHECK(*top[i - 1].confidence >= *top[i].confidence);
}

TEST_CASE("select_top_mined: missing confidence") {
    std::vector<NLCodePair> mined = {mined_pair("a", 0.9)};
    mined.push_back(NLCodePair::make("no conf", "x()", Source::mined));
    CHECK_THROWS_AS(select_top_mined(mined, 10), MissingConfidence);
}

TEST_CASE("assemble: the three data strategies") {
    std::vector<NLCodePair> ann = {NLCodePair::make("t1", "a()", Source::annotated),
                                   NLCodePair::make("t2", "b()", Source::annotated)};
    std::vector<NLCodePair> mined = {mined_pair("m1", 0.9), mined_pair("m2", 0.8),
                                     mined_pair("m3", 0.7)};
    std::vector<NLCodePair> api = {NLCodePair::make("a1", "api.one()", Source::api),
                                   NLCodePair::make("a2", "api.two()", Source::api)};

    DataStrategy man{StrategyLabel::man, 100000, ApiSource::none};
    AssembledCorpus c1 = assemble(man, ann, {}, {});
    CHECK(c1.pretrain.empty());
    CHECK(c1.finetune.size() == 2);

    DataStrategy man_mine{StrategyLabel::man_mine, 2, ApiSource::none};
    AssembledCorpus c2 = assemble(man_mine, ann, mined, {});
    CHECK(c2.pretrain.size() == 2);
    CHECK(c2.finetune.size() == 2);

    DataStrategy full{StrategyLabel::man_mine_api, 2, ApiSource::raw};
    AssembledCorpus c3 = assemble(full, ann, mined, api);
    REQUIRE(c3.pretrain.size() == 4);  // conservation: top-k mined + api
    CHECK(c3.pretrain[0].source == Source::mined);
    CHECK(c3.pretrain[2].source == Source::api);
    CHECK(c3.pretrain[2].pair_id == api[0].pair_id);
    CHECK(c3.pretrain[3].pair_id == api[1].pair_id);
}

TEST_CASE("assemble: strategy mismatch") {
    std::vector<NLCodePair> ann = {NLCodePair::make("t", "a()", Source::annotated)};
    DataStrategy bad1{StrategyLabel::man, 10, ApiSource::dist};
    CHECK_THROWS_AS(assemble(bad1, ann, {}, {}), StrategyMismatch);
    DataStrategy bad2{StrategyLabel::man_mine_api, 10, ApiSource::none};
    CHECK_THROWS_AS(assemble(bad2, ann, {}, {}), StrategyMismatch);
}

TEST_CASE("find_leakage: detects dev/test ids in pretrain") {
    std::vector<NLCodePair> dev = {NLCodePair::make("d", "dev()", Source::annotated)};
    std::vector<NLCodePair> test = {NLCodePair::make("t", "test()", Source::annotated)};
    std::vector<NLCodePair> clean = {NLCodePair::make("x", "other()", Source::mined, 0.5)};
    CHECK(find_leakage(clean, dev, test).empty());

    std::vector<NLCodePair> dirty = clean;
    dirty.push_back(NLCodePair::make("t", "test()", Source::mined, 0.9));
    auto leaked = find_leakage(dirty, dev, test);
    REQUIRE(leaked.size() == 1);
    CHECK(leaked[0] == compute_pair_id("t", "test()"));
}
