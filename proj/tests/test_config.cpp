#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lexmatcher/error.hpp"
#include "lexmatcher/manifest.hpp"
#include "lexmatcher/pipeline.hpp"
#include "lexmatcher/toml.hpp"

#include "support.hpp"

using namespace lexmatcher;
using namespace lexmatcher::test;

TEST_CASE("toml parser handles sections, scalars, arrays and comments") {
    TomlTable t = TomlTable::parse(
        "top = 1\n"
        "# a comment\n"
        "[filter]\n"
        "max_words = 80   # trailing comment\n"
        "min_len_ratio = \"1/3\"\n"
        "inverted = true\n"
        "weight = 0.25\n"
        "[sft]\n"
        "templates = [\"a # not a comment\", \"b\"]\n"
        "ks = [1, 2, 3]\n",
        "test");
    CHECK(t.get_int("top") == 1);
    CHECK(t.get_int("filter.max_words") == 80);
    CHECK(t.get_string("filter.min_len_ratio") == "1/3");
    CHECK(t.get_bool("filter.inverted"));
    CHECK(t.get_double("filter.weight") == doctest::Approx(0.25));
    CHECK(t.get_string_array("sft.templates") ==
          std::vector<std::string>{"a # not a comment", "b"});
    CHECK(t.get_int_array("sft.ks") == std::vector<std::int64_t>{1, 2, 3});
    CHECK(t.has("filter.max_words"));
    CHECK_FALSE(t.has("filter.nope"));
}

TEST_CASE("toml parser rejects malformed input with line numbers") {
    CHECK_THROWS_AS(TomlTable::parse("[unclosed\n", "t"), ParseError);
    CHECK_THROWS_AS(TomlTable::parse("novalue\n", "t"), ParseError);
    CHECK_THROWS_AS(TomlTable::parse("x = \"unterminated\n", "t"), ParseError);
    CHECK_THROWS_AS(TomlTable::parse("x = 1\nx = 2\n", "t"), ParseError);
    try {
        TomlTable::parse("ok = 1\nbad =\n", "t");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("toml type mismatches raise ConfigError") {
    TomlTable t = TomlTable::parse("x = 1\ns = \"v\"\n", "t");
    CHECK_THROWS_AS(t.get_string("x"), ConfigError);
    CHECK_THROWS_AS(t.get_int("s"), ConfigError);
    CHECK_THROWS_AS(t.get_bool("s"), ConfigError);
}

TEST_CASE("pipeline config rejects unknown keys by name") {
    TomlTable t = TomlTable::parse("[match]\nkay = 3\n", "t");
    try {
        PipelineConfig::from_toml(t);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("match.kay") != std::string::npos);
    }
}

TEST_CASE("pipeline config reads thresholds exactly and scales quality") {
    TomlTable t = TomlTable::parse(
        "[filter]\n"
        "min_len_ratio = \"1/3\"\n"
        "max_repeat_ratio = \"0.3\"\n"
        "min_quality = 40\n"
        "score_scale = \"percent\"\n"
        "[match]\n"
        "k = 2\n"
        "[run]\n"
        "seed = 7\n",
        "t");
    PipelineConfig cfg = PipelineConfig::from_toml(t);
    CHECK(cfg.filter.min_len_ratio == (Rational{1, 3}));
    CHECK(cfg.filter.max_repeat_ratio == (Rational{3, 10}));
    CHECK(cfg.filter.min_quality == doctest::Approx(0.40));
    CHECK(cfg.k == 2);
    CHECK(cfg.seed == 7);

    SUBCASE("unit scale keeps min_quality as given") {
        TomlTable t2 = TomlTable::parse(
            "[filter]\nscore_scale = \"unit\"\nmin_quality = 0.35\n", "t");
        CHECK(PipelineConfig::from_toml(t2).filter.min_quality == doctest::Approx(0.35));
    }
}

TEST_CASE("config canonical form is stable and excludes threads") {
    PipelineConfig a;
    PipelineConfig b;
    b.threads = 16;
    CHECK(a.canonical() == b.canonical());
    b.k = 5;
    CHECK(a.canonical() != b.canonical());
}

TEST_CASE("validate_paths names the missing file") {
    PipelineConfig cfg;
    cfg.src = "/definitely/not/here.src";
    cfg.tgt = "/definitely/not/here.tgt";
    cfg.dict = "/definitely/not/here.tsv";
    try {
        cfg.validate_paths(true);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/definitely/not/here.src") != std::string::npos);
    }
}

TEST_CASE("digests are stable and sensitive") {
    TempDir dir("man");
    write_file(dir.file("a"), "hello");
    write_file(dir.file("b"), "hello");
    write_file(dir.file("c"), "hellp");
    CHECK(digest_file(dir.file("a")) == digest_file(dir.file("b")));
    CHECK(digest_file(dir.file("a")) != digest_file(dir.file("c")));
    CHECK(digest_text("hello") == digest_file(dir.file("a")));
}

TEST_CASE("stage manifests gate re-execution") {
    TempDir dir("man");
    write_file(dir.file("in.txt"), "input");
    write_file(dir.file("out.txt"), "output");

    StageManifest manifest;
    manifest.stage = "demo";
    manifest.inputs = {{dir.file("in.txt").string(), digest_file(dir.file("in.txt"))}};
    manifest.config_digest = digest_text("cfg");
    manifest.outputs = {{dir.file("out.txt").string(), digest_file(dir.file("out.txt"))}};
    manifest.save(dir.file("demo.json"));

    CHECK(stage_is_current(dir.file("demo.json"), "demo", manifest.inputs, manifest.config_digest));
    CHECK_FALSE(stage_is_current(dir.file("demo.json"), "demo", manifest.inputs, digest_text("other")));
    CHECK_FALSE(stage_is_current(dir.file("missing.json"), "demo", manifest.inputs,
                                 manifest.config_digest));

    SUBCASE("input change invalidates") {
        auto inputs = manifest.inputs;
        inputs.begin()->second = digest_text("changed");
        CHECK_FALSE(stage_is_current(dir.file("demo.json"), "demo", inputs, manifest.config_digest));
    }
    SUBCASE("output tampering invalidates") {
        write_file(dir.file("out.txt"), "tampered");
        CHECK_FALSE(stage_is_current(dir.file("demo.json"), "demo", manifest.inputs,
                                     manifest.config_digest));
    }
    SUBCASE("missing output invalidates") {
        std::filesystem::remove(dir.file("out.txt"));
        CHECK_FALSE(stage_is_current(dir.file("demo.json"), "demo", manifest.inputs,
                                     manifest.config_digest));
    }
}

TEST_CASE("gaps jsonl round-trips sense data") {
    TempDir dir("gaps");
    PairResources res;
    res.source = LangResources::for_language("en");
    res.target = LangResources::for_language("zh");
    SensePair sense{{"bank"},
                    {"\xe9\x93\xb6", "\xe8\xa1\x8c"},
                    Pos::Noun,
                    true,
                    "bank.n.01",
                    "a financial institution",
                    SenseOrigin::Dictionary};
    write_gaps_jsonl({&sense}, res, dir.file("g.jsonl"));
    std::vector<SensePair> loaded = read_gaps_jsonl(dir.file("g.jsonl"));
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].sense_id == "bank.n.01");
    CHECK(loaded[0].source_segment == sense.source_segment);
    CHECK(loaded[0].target_segment == sense.target_segment);
    CHECK(loaded[0].pos == Pos::Noun);
    CHECK(loaded[0].definition == "a financial institution");
}
