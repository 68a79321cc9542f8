#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lexmatcher/pipeline.hpp"

#include "support.hpp"

#include <cstdlib>
#include <sstream>

using namespace lexmatcher;
using namespace lexmatcher::test;

namespace {

int run_cli(const std::string& args, const std::filesystem::path& stderr_file) {
    std::string cmd = std::string(LEXMATCHER_CLI_PATH) + " " + args + " 2> " + stderr_file.string();
    int status = std::system(cmd.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

// Small but complete fixture: scored en->de corpus, a four-sense noun (three
// senses stay uncovered, feeding the gaps/augment stages), one phrase, one
// entity, plus canned chat responses for offline ingestion.
struct PipelineFixture {
    TempDir dir{"cli"};

    PipelineFixture() {
        write_file(dir.file("corpus.src"),
                   "the bank was steep\n"
                   "the bank was steep\n"
                   "we take over the firm\n"
                   "a ship on the river\n"
                   "the bank kept my money\n"
                   "nothing matches here\n");
        write_file(dir.file("corpus.tgt"),
                   "das ufer war steil\n"
                   "das ufer war steil\n"
                   "wir ubernehmen die firma\n"
                   "ein schiff auf dem fluss\n"
                   "die bank behielt mein geld\n"
                   "hier passt nichts\n");
        write_file(dir.file("corpus.scores"), "90\n90\n80\n70\n85\n60\n");
        write_file(dir.file("dict.tsv"),
                   "bank\tufer\tnoun\tbank.n.01\tsloping land beside water\n"
                   "bank\tbank\tnoun\tbank.n.02\ta financial institution\n"
                   "bank\tbankgebaeude\tnoun\tbank.n.03\tthe building itself\n"
                   "bank\tblutbank\tnoun\tbank.n.04\ta stored reserve\n"
                   "take over\tubernehmen\tverb\ttake_over.v.01\tassume control\n"
                   "ship\tschiff\tnoun\tship.n.01\ta large vessel\n");
        write_file(dir.file("entities.tsv"), "River Plate\tRiver Plate\n");
        write_file(dir.file("stop.src"), "the\na\nwe\non\n");
        write_file(dir.file("stop.tgt"), "das\ndie\ndem\nein\nwir\nauf\n");
        write_file(dir.file("responses.jsonl"),
                   R"({"sense_id":"bank.n.03","response":"Source: The bank was built in 1900.\nTarget: Das bankgebaeude wurde 1900 gebaut.","ok":true,"error":""})"
                   "\n"
                   R"({"sense_id":"bank.n.04","response":"Source: They stored it away.\nTarget: Kein treffer.","ok":true,"error":""})"
                   "\n");
        std::ostringstream toml;
        toml << "[paths]\n"
             << "src = \"" << dir.file("corpus.src").string() << "\"\n"
             << "tgt = \"" << dir.file("corpus.tgt").string() << "\"\n"
             << "scores = \"" << dir.file("corpus.scores").string() << "\"\n"
             << "dict = \"" << dir.file("dict.tsv").string() << "\"\n"
             << "entities = \"" << dir.file("entities.tsv").string() << "\"\n"
             << "stopwords_src = \"" << dir.file("stop.src").string() << "\"\n"
             << "stopwords_tgt = \"" << dir.file("stop.tgt").string() << "\"\n"
             << "[langs]\n"
             << "source = \"en\"\n"
             << "target = \"de\"\n"
             << "[filter]\n"
             << "min_quality = 65\n"
             << "[match]\n"
             << "k = 2\n"
             << "[augment]\n"
             << "offline = true\n"
             << "responses = \"" << dir.file("responses.jsonl").string() << "\"\n"
             << "[stats]\n"
             << "ks = [1, 2]\n"
             << "[run]\n"
             << "seed = 42\n";
        write_file(dir.file("pipeline.toml"), toml.str());
    }

    std::string config_flag() const { return "--config " + dir.file("pipeline.toml").string(); }
};

} // namespace

TEST_CASE("match subcommand writes subset and coverage artifacts") {
    PipelineFixture fx;
    auto out = fx.dir.file("match_out");
    int rc = run_cli("match --src " + fx.dir.file("corpus.src").string() + " --tgt " +
                         fx.dir.file("corpus.tgt").string() + " --dict " +
                         fx.dir.file("dict.tsv").string() + " --k 3 --out-dir " + out.string() +
                         " --src-lang en --tgt-lang de",
                     fx.dir.file("err.txt"));
    REQUIRE(rc == 0);
    CHECK(std::filesystem::exists(out / "subset.src"));
    CHECK(std::filesystem::exists(out / "subset.tgt"));
    CHECK(std::filesystem::exists(out / "coverage.json"));
    CHECK(std::filesystem::exists(out / "matches.jsonl"));
}

TEST_CASE("invalid config keys fail with the key name in the message") {
    TempDir dir("cli_badcfg");
    write_file(dir.file("bad.toml"), "[match]\nkay = 3\n");
    write_file(dir.file("x"), "x\n");
    int rc = run_cli("match --config " + dir.file("bad.toml").string() + " --src " +
                         dir.file("x").string() + " --tgt " + dir.file("x").string() +
                         " --dict " + dir.file("x").string() + " --out-dir " +
                         dir.file("out").string(),
                     dir.file("err.txt"));
    CHECK(rc != 0);
    CHECK(read_file(dir.file("err.txt")).find("match.kay") != std::string::npos);
}

TEST_CASE("missing inputs fail with the path in the message") {
    TempDir dir("cli_missing");
    int rc = run_cli("pipeline --out-dir " + dir.file("out").string(), dir.file("err.txt"));
    CHECK(rc != 0);
    CHECK(read_file(dir.file("err.txt")).find("paths.src") != std::string::npos);
}

TEST_CASE("pipeline runs end to end, resumes, and is deterministic") {
    PipelineFixture fx;
    auto out1 = fx.dir.file("out1");
    auto out2 = fx.dir.file("out2");

    REQUIRE(run_cli("pipeline " + fx.config_flag() + " --out-dir " + out1.string(),
                    fx.dir.file("err1.txt")) == 0);
    for (const char* artifact :
         {"filtered.src", "subset.src", "subset.tgt", "coverage.json", "matches.jsonl",
          "gaps.jsonl", "prompts.jsonl", "augmented.jsonl", "train.jsonl", "freq_src.csv",
          "freq_tgt.csv", "subset_sizes.csv"}) {
        CHECK(std::filesystem::exists(out1 / artifact));
    }

    SUBCASE("identical rerun into a fresh directory is byte-identical") {
        REQUIRE(run_cli("pipeline " + fx.config_flag() + " --out-dir " + out2.string(),
                        fx.dir.file("err2.txt")) == 0);
        for (const char* artifact : {"train.jsonl", "coverage.json", "freq_src.csv",
                                     "freq_tgt.csv", "subset_sizes.csv"}) {
            CHECK(read_file(out1 / artifact) == read_file(out2 / artifact));
        }
    }

    SUBCASE("rerun without --force skips every stage") {
        REQUIRE(run_cli("pipeline " + fx.config_flag() + " --out-dir " + out1.string(),
                        fx.dir.file("err3.txt")) == 0);
        std::string log = read_file(fx.dir.file("err3.txt"));
        for (const char* stage : {"filter", "match", "gaps", "augment", "build-sft", "stats"}) {
            CHECK(log.find(std::string("[") + stage + "] up-to-date") != std::string::npos);
        }
    }

    SUBCASE("--force re-executes stages") {
        REQUIRE(run_cli("pipeline " + fx.config_flag() + " --out-dir " + out1.string() + " --force",
                        fx.dir.file("err4.txt")) == 0);
        CHECK(read_file(fx.dir.file("err4.txt")).find("up-to-date") == std::string::npos);
    }

    SUBCASE("config changes re-run affected stages") {
        std::string toml = read_file(fx.dir.file("pipeline.toml"));
        write_file(fx.dir.file("pipeline.toml"), toml + "\n"); // digest changes, values do not
        REQUIRE(run_cli("pipeline " + fx.config_flag() + " --out-dir " + out1.string(),
                        fx.dir.file("err5.txt")) == 0);
        // effective config is unchanged, so stages still skip
        CHECK(read_file(fx.dir.file("err5.txt")).find("[filter] up-to-date") != std::string::npos);

        write_file(fx.dir.file("pipeline.toml"),
                   toml + "\n[sft]\nmax_constraints_per_sample = 2\n");
        REQUIRE(run_cli("pipeline " + fx.config_flag() + " --out-dir " + out1.string(),
                        fx.dir.file("err6.txt")) == 0);
        CHECK(read_file(fx.dir.file("err6.txt")).find("up-to-date") == std::string::npos);
    }
}

TEST_CASE("pipeline artifacts reflect the fixture semantics") {
    PipelineFixture fx;
    auto out = fx.dir.file("out");
    std::ostringstream log;
    PipelineConfig cfg = PipelineConfig::from_file(fx.dir.file("pipeline.toml"));
    Pipeline pipeline(cfg, out, false, log);
    pipeline.run();

    // Filter: the duplicate pair and the low-quality pair are gone.
    std::vector<std::string> filtered = read_lines(out / "filtered.src");
    CHECK(filtered.size() == 4);

    // Match: every retained pair grounds at least one sense.
    std::vector<std::string> subset = read_lines(out / "subset.src");
    CHECK(subset.size() == 4);
    // Ranked traversal: the 0.9-scored pair comes first.
    CHECK(subset[0] == "the bank was steep");

    // Gaps: "bank" is a four-sense noun; bank.n.01/02 are covered, so the
    // augmentable gap senses are exactly bank.n.03 and bank.n.04.
    std::vector<SensePair> gaps = read_gaps_jsonl(out / "gaps.jsonl");
    REQUIRE(gaps.size() == 2);
    CHECK(gaps[0].sense_id == "bank.n.03");
    CHECK(gaps[1].sense_id == "bank.n.04");

    // Augment: one response passes containment, the other misses its source
    // segment.
    std::vector<GeneratedPair> generated = read_augmented_jsonl(out / "augmented.jsonl");
    REQUIRE(generated.size() == 2);
    CHECK(generated[0].valid);
    CHECK_FALSE(generated[1].valid);
    CHECK(generated[1].reason == "source segment absent");

    // Train: 4 subset pairs + 1 valid S_c pair as general samples, plus one
    // constrained sample per eligible subset pair.
    std::vector<std::string> train = read_lines(out / "train.jsonl");
    CHECK(train.size() == 5 + 4);
}
