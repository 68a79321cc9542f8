#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lexmatcher/error.hpp"
#include "lexmatcher/lemmatizer.hpp"
#include "lexmatcher/rational.hpp"
#include "lexmatcher/rng.hpp"
#include "lexmatcher/text.hpp"

#include "support.hpp"

using namespace lexmatcher;
using namespace lexmatcher::test;

TEST_CASE("whitespace tokenizer splits on runs of blanks") {
    Tokenizer ws(TokenizerMode::Whitespace);
    CHECK(ws.tokenize("  a\tbb  c\n") == std::vector<std::string>{"a", "bb", "c"});
    CHECK(ws.tokenize("").empty());
    CHECK(ws.tokenize("   ").empty());
}

TEST_CASE("cjk tokenizer isolates han characters") {
    Tokenizer zh(TokenizerMode::CjkChar);
    // 我喜欢ACL2024。 -> 我 喜 欢 ACL2024。
    CHECK(zh.tokenize("\xe6\x88\x91\xe5\x96\x9c\xe6\xac\xa2" "ACL2024") ==
          std::vector<std::string>{"\xe6\x88\x91", "\xe5\x96\x9c", "\xe6\xac\xa2", "ACL2024"});
    CHECK(zh.tokenize("\xe9\x93\xb6\xe8\xa1\x8c") ==
          std::vector<std::string>{"\xe9\x93\xb6", "\xe8\xa1\x8c"});
    CHECK(Tokenizer::for_language("zh-CN").mode() == TokenizerMode::CjkChar);
    CHECK(Tokenizer::for_language("en").mode() == TokenizerMode::Whitespace);
}

TEST_CASE("cjk join glues han boundaries and spaces the rest") {
    Tokenizer zh(TokenizerMode::CjkChar);
    CHECK(zh.join({"\xe9\x93\xb6", "\xe8\xa1\x8c"}) == "\xe9\x93\xb6\xe8\xa1\x8c");
    CHECK(zh.join({"hello", "world"}) == "hello world");
    Tokenizer ws(TokenizerMode::Whitespace);
    CHECK(ws.join({"take", "over"}) == "take over");
}

TEST_CASE("utf8 helpers") {
    CHECK(utf8::length("abc") == 3);
    CHECK(utf8::length("\xe9\x93\xb6\xe8\xa1\x8c") == 2);
    CHECK(utf8::lowercase("BaNK") == "bank");
    CHECK(utf8::lowercase("\xd0\x91\xd0\x90\xd0\x9d\xd0\x9a") == "\xd0\xb1\xd0\xb0\xd0\xbd\xd0\xba");
    CHECK(collapse_whitespace("  a   b\t c ") == "a b c");
    CHECK(trim(" x ") == "x");
}

TEST_CASE("english lemmatizer strips plurals and verb suffixes") {
    Lemmatizer en = Lemmatizer::english();
    CHECK(en.lemmatize("banks") == "bank");
    CHECK(en.lemmatize("Banks,") == "bank");
    CHECK(en.lemmatize("ponies") == "pony");
    CHECK(en.lemmatize("glasses") == "glass");
    CHECK(en.lemmatize("boxes") == "box");
    CHECK(en.lemmatize("running") == "run");
    CHECK(en.lemmatize("stopped") == "stop");
    CHECK(en.lemmatize("falling") == "fall");
    CHECK(en.lemmatize("tried") == "try");
    CHECK(en.lemmatize("bank") == "bank");
    CHECK(en.lemmatize("this") == "this");
    CHECK(en.lemmatize("...") == "...");
}

TEST_CASE("exception table wins over suffix rules") {
    Lemmatizer en = Lemmatizer::english();
    en.add_exception("mice", "mouse");
    en.add_exception("went", "go");
    CHECK(en.lemmatize("mice") == "mouse");
    CHECK(en.lemmatize("Went") == "go");
    CHECK(en.lemmatize("MICE.") == "mouse");
}

TEST_CASE("exception table loads from file and reports bad lines") {
    TempDir dir("lemma");
    write_file(dir.file("exc.tsv"), "# comment\nmice\tmouse\n\nwent\tgo\n");
    Lemmatizer en = Lemmatizer::english();
    en.load_exceptions(dir.file("exc.tsv"));
    CHECK(en.exception_count() == 2);
    CHECK(en.lemmatize("mice") == "mouse");

    write_file(dir.file("bad.tsv"), "no_tab_here\n");
    CHECK_THROWS_AS(en.load_exceptions(dir.file("bad.tsv")), ParseError);
}

TEST_CASE("lemmatization is idempotent and total") {
    Lemmatizer en = Lemmatizer::english();
    en.add_exception("geese", "goose");
    DeterministicRng rng(17);
    const std::string suffixes[] = {"", "s", "es", "ies", "ed", "ing", "sses", "ment"};
    const std::string stems[] = {"walk", "stop", "poni", "glass", "f", "carr", "b", "x", "try"};
    for (int trial = 0; trial < 2000; ++trial) {
        std::string word = stems[rng.next_below(9)];
        word += suffixes[rng.next_below(8)];
        if (rng.next_below(4) == 0) word += suffixes[rng.next_below(8)];
        if (rng.next_below(5) == 0) word = "," + word + ".";
        std::string once = en.lemmatize(word);
        CHECK(en.lemmatize(once) == once);
        CHECK_FALSE(once.empty());
    }
    CHECK(en.lemmatize("") == "");
}

TEST_CASE("identity lemmatizer only normalizes surface form") {
    Lemmatizer id = Lemmatizer::identity();
    CHECK(id.lemmatize("Chaises") == "chaises");
    CHECK(id.lemmatize("BANK,") == "bank");
}

TEST_CASE("rational parsing and exact comparisons") {
    CHECK(Rational::parse("1/3") == (Rational{1, 3}));
    CHECK(Rational::parse("0.3") == (Rational{3, 10}));
    CHECK(Rational::parse("3") == (Rational{3, 1}));
    CHECK(Rational::parse("0.40") == (Rational{2, 5}));
    CHECK_THROWS_AS(Rational::parse("x"), ConfigError);
    CHECK_THROWS_AS(Rational::parse("1/0"), ConfigError);

    Rational third{1, 3};
    CHECK(third.ratio_lt(10, 31));       // 10/31 < 1/3
    CHECK_FALSE(third.ratio_lt(10, 30)); // exactly 1/3
    Rational point3{3, 10};
    CHECK(point3.ratio_gt(3, 4));        // 0.75 > 0.3
    CHECK_FALSE(point3.ratio_gt(3, 10)); // exactly 0.3
}
