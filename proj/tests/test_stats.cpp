#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lexmatcher/stats.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <sstream>

using namespace lexmatcher;
using namespace lexmatcher::test;

TEST_CASE("frequency_profile counts tokens with deterministic ranking") {
    Tokenizer ws(TokenizerMode::Whitespace);
    FrequencyProfile profile = frequency_profile({"a a b"}, ws);
    REQUIRE(profile.table.size() == 2);
    CHECK(profile.table[0].rank == 1);
    CHECK(profile.table[0].token == "a");
    CHECK(profile.table[0].count == 2);
    CHECK(profile.table[1].rank == 2);
    CHECK(profile.table[1].token == "b");
    CHECK(profile.table[1].count == 1);
    CHECK(profile.unique_types == 2);
    CHECK(profile.total_tokens == 3);
}

TEST_CASE("frequency_profile of an empty corpus is empty") {
    Tokenizer ws(TokenizerMode::Whitespace);
    FrequencyProfile profile = frequency_profile({}, ws);
    CHECK(profile.table.empty());
    CHECK(profile.unique_types == 0);
    CHECK(profile.total_tokens == 0);
}

TEST_CASE("equal counts rank lexicographically") {
    Tokenizer ws(TokenizerMode::Whitespace);
    FrequencyProfile profile = frequency_profile({"zebra apple zebra apple mango"}, ws);
    REQUIRE(profile.table.size() == 3);
    CHECK(profile.table[0].token == "apple"); // 2, ties broken a < z
    CHECK(profile.table[1].token == "zebra");
    CHECK(profile.table[2].token == "mango");
}

TEST_CASE("profile totals are additive over concatenation") {
    Tokenizer ws(TokenizerMode::Whitespace);
    DeterministicRng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::string> a, b;
        for (std::size_t i = 0; i < rng.next_below(50); ++i) {
            a.push_back("w" + std::to_string(rng.next_below(10)) + " w" +
                        std::to_string(rng.next_below(10)));
        }
        for (std::size_t i = 0; i < rng.next_below(50); ++i) {
            b.push_back("v" + std::to_string(rng.next_below(10)));
        }
        std::vector<std::string> ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        CHECK(frequency_profile(ab, ws).total_tokens ==
              frequency_profile(a, ws).total_tokens + frequency_profile(b, ws).total_tokens);
    }
}

TEST_CASE("parallel counting merges to the sequential profile") {
    Tokenizer ws(TokenizerMode::Whitespace);
    std::vector<std::string> lines;
    DeterministicRng rng(5);
    for (int i = 0; i < 6000; ++i) {
        lines.push_back("w" + std::to_string(rng.next_below(100)) + " w" +
                        std::to_string(rng.next_below(100)));
    }
    FrequencyProfile seq = frequency_profile(lines, ws, 1);
    FrequencyProfile par = frequency_profile(lines, ws, 8);
    REQUIRE(seq.table.size() == par.table.size());
    for (std::size_t i = 0; i < seq.table.size(); ++i) {
        CHECK(seq.table[i].token == par.table[i].token);
        CHECK(seq.table[i].count == par.table[i].count);
    }
}

TEST_CASE("compare_profiles reports identical numbers for identical profiles") {
    Tokenizer ws(TokenizerMode::Whitespace);
    FrequencyProfile p = frequency_profile({"a a b c"}, ws);
    ProfileComparison cmp = compare_profiles(p, p);
    CHECK(cmp.unique_types_a == cmp.unique_types_b);
    CHECK(cmp.total_tokens_a == cmp.total_tokens_b);
    CHECK(cmp.head_mass_a == doctest::Approx(cmp.head_mass_b));
}

TEST_CASE("a balanced corpus has lower head mass than a skewed one") {
    Tokenizer ws(TokenizerMode::Whitespace);
    // Skewed: "a" dominates, computed by hand: head covers everything.
    std::vector<std::string> skewed;
    for (int i = 0; i < 90; ++i) skewed.push_back("a");
    for (int i = 0; i < 10; ++i) skewed.push_back("b" + std::to_string(i));
    // Balanced: 200 distinct singleton tokens; top-100 share = 100/200 = 0.5.
    std::vector<std::string> balanced;
    for (int i = 0; i < 200; ++i) balanced.push_back("u" + std::to_string(i));

    FrequencyProfile sp = frequency_profile(skewed, ws);
    FrequencyProfile bp = frequency_profile(balanced, ws);
    ProfileComparison cmp = compare_profiles(sp, bp);
    CHECK(cmp.head_mass_a == doctest::Approx(1.0)); // top-100 ranks cover the whole vocabulary
    CHECK(cmp.head_mass_b == doctest::Approx(0.5));
    CHECK(cmp.head_mass_b < cmp.head_mass_a);
}

TEST_CASE("disjoint vocabularies report independent type counts") {
    Tokenizer ws(TokenizerMode::Whitespace);
    FrequencyProfile a = frequency_profile({"x y z"}, ws);
    FrequencyProfile b = frequency_profile({"p q"}, ws);
    ProfileComparison cmp = compare_profiles(a, b);
    CHECK(cmp.unique_types_a == 3);
    CHECK(cmp.unique_types_b == 2);
}

TEST_CASE("profile csv is rank,token,count with quoting only when needed") {
    TempDir dir("stats");
    Tokenizer ws(TokenizerMode::Whitespace);
    FrequencyProfile p = frequency_profile({"a a b"}, ws);
    write_profile_csv(p, dir.file("f.csv"));
    CHECK(read_file(dir.file("f.csv")) == "rank,token,count\n1,a,2\n2,b,1\n");
}

TEST_CASE("subset_size_table matches independent per-K runs") {
    RandomFixture fixture = make_random_fixture(31, 600, 25, 80, true);
    std::vector<int> ks = {0, 1, 2, 3};
    std::vector<SubsetSizeRow> rows =
        subset_size_table(fixture.corpus, fixture.lexicon, ks, fixture.res);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        OracleResult oracle =
            oracle_retrieve(fixture.corpus, fixture.lexicon.entries(), ks[i], fixture.res);
        CHECK(rows[i].k == ks[i]);
        CHECK(rows[i].subset_size == oracle.selected.size());
    }

    SUBCASE("empty lexicon gives all-zero sizes") {
        Lexicon empty(8);
        for (const SubsetSizeRow& row :
             subset_size_table(fixture.corpus, empty, ks, fixture.res)) {
            CHECK(row.subset_size == 0);
        }
    }

    SUBCASE("csv includes the raw size row") {
        TempDir dir("stats");
        write_subset_sizes_csv(rows, fixture.corpus.size(), dir.file("s.csv"));
        std::string csv = read_file(dir.file("s.csv"));
        CHECK(csv.find("k,subset_size\nraw,600\n0,") == 0);
    }
}

TEST_CASE("subset sizes are non-decreasing in K on sense-rich fixtures") {
    // Empirical tendency (not a theorem): plentiful per-sense contexts.
    RandomFixture fixture = make_random_fixture(44, 2000, 15, 60, true);
    std::vector<int> ks = {1, 2, 3, 4};
    std::vector<SubsetSizeRow> rows =
        subset_size_table(fixture.corpus, fixture.lexicon, ks, fixture.res);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].subset_size >= rows[i - 1].subset_size);
    }
}
