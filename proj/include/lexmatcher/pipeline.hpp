#pragma once

#include "lexmatcher/augment.hpp"
#include "lexmatcher/filter.hpp"
#include "lexmatcher/sft.hpp"
#include "lexmatcher/toml.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lexmatcher {

struct AugmentSettings {
    bool offline = true;
    std::string template_path; // empty = built-in template
    std::string responses;     // responses.jsonl to ingest (offline mode)
    bool retry_invalid = false;
    EndpointConfig endpoint;
};

/// Effective configuration for every stage; loaded from one TOML file with
/// per-stage sections, then overridden by CLI flags.
struct PipelineConfig {
    // [paths]
    std::string src, tgt, scores;
    std::string dict, entities;
    std::string stopwords_src, stopwords_tgt;
    std::string lemma_exceptions_src, lemma_exceptions_tgt;
    std::string src_lemmas, tgt_lemmas; // pre-lemmatized sidecars

    // [langs]
    std::string source_lang = "en";
    std::string target_lang = "de";

    // [filter]
    FilterConfig filter;
    ScoreScale score_scale = ScoreScale::Percent;

    // [match]
    int k = 3;
    bool no_rank = false;
    int max_segment_len = 8;

    // [augment]
    AugmentSettings augment;

    // [sft]
    BuildConfig sft;

    // [stats]
    std::vector<int> stats_ks = {1, 2, 3};

    // [run]
    std::uint64_t seed = 42;
    int threads = 0; // 0 = hardware default

    static PipelineConfig defaults() { return {}; }

    /// Rejects unknown keys by name.
    static PipelineConfig from_toml(const TomlTable& table);
    static PipelineConfig from_file(const std::filesystem::path& path);

    /// Sorted key=value dump of everything that affects artifacts (threads
    /// excluded: results are thread-count independent by contract).
    std::string canonical() const;

    /// Loads tokenizers, lemmatizers, exception tables and stopwords.
    PairResources make_resources() const;

    /// Checks that every configured input path exists; names the missing one.
    void validate_paths(bool require_corpus) const;
};

ScoreScale parse_score_scale(std::string_view text);
DedupKey parse_dedup_key(std::string_view text);

// Gap list artifact (matcher output, augment input).
void write_gaps_jsonl(const std::vector<const SensePair*>& gaps, const PairResources& res,
                      const std::filesystem::path& path);
std::vector<SensePair> read_gaps_jsonl(const std::filesystem::path& path);

/// Serial stage driver with per-stage manifests: a completed stage whose
/// inputs, config, and outputs are unchanged is skipped unless forced.
class Pipeline {
public:
    Pipeline(PipelineConfig config, std::filesystem::path out_dir, bool force, std::ostream& log);

    /// Runs filter, match, gaps, augment, build-sft, stats in order.
    void run();

    std::filesystem::path artifact(const std::string& name) const { return out_dir_ / name; }

private:
    bool should_run(const std::string& stage, const std::map<std::string, std::string>& inputs);
    void finish(const std::string& stage, const std::map<std::string, std::string>& inputs,
                const std::vector<std::filesystem::path>& outputs);
    std::map<std::string, std::string> digest_inputs(const std::vector<std::string>& paths) const;
    const Lexicon& lexicon();

    void run_filter();
    void run_match();
    void run_gaps();
    void run_augment();
    void run_build_sft();
    void run_stats();

    PipelineConfig config_;
    std::filesystem::path out_dir_;
    std::filesystem::path manifest_dir_;
    bool force_;
    std::ostream& log_;
    std::string config_digest_;
    PairResources resources_;
    std::optional<Lexicon> lexicon_;
};

} // namespace lexmatcher
