#include "lexmatcher/augment.hpp"
#include "lexmatcher/error.hpp"
#include "lexmatcher/filter.hpp"
#include "lexmatcher/matcher.hpp"
#include "lexmatcher/pipeline.hpp"
#include "lexmatcher/sft.hpp"
#include "lexmatcher/stats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <unordered_set>

namespace lm = lexmatcher;
namespace fs = std::filesystem;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::int64_t seed = -1;   // -1 = take from config
    int threads = -1;
    std::string src_lang, tgt_lang;
};

lm::PipelineConfig effective_config(const GlobalArgs& args) {
    lm::PipelineConfig cfg = args.config_path.empty()
                                 ? lm::PipelineConfig::defaults()
                                 : lm::PipelineConfig::from_file(args.config_path);
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (args.threads >= 0) cfg.threads = args.threads;
    if (!args.src_lang.empty()) cfg.source_lang = args.src_lang;
    if (!args.tgt_lang.empty()) cfg.target_lang = args.tgt_lang;
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw lm::IoError("cannot write " + path.string());
    out << text << '\n';
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw lm::IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

lm::Lexicon load_lexicon(const lm::PipelineConfig& cfg, const lm::PairResources& res) {
    if (cfg.dict.empty()) throw lm::ConfigError("missing required path: paths.dict (--dict)");
    lm::Lexicon lexicon = lm::load_dictionary(cfg.dict, res, cfg.max_segment_len);
    if (!cfg.entities.empty()) lm::merge_entities(lexicon, cfg.entities, res);
    return lexicon;
}

lm::Corpus load_scored_corpus(const lm::PipelineConfig& cfg) {
    lm::Corpus corpus = lm::load_corpus(cfg.src, cfg.tgt, cfg.source_lang, cfg.target_lang);
    if (!cfg.scores.empty()) {
        corpus = lm::attach_scores(std::move(corpus), cfg.scores, cfg.score_scale);
    }
    return corpus;
}

int cmd_filter(const lm::PipelineConfig& cfg, const std::string& out_prefix) {
    lm::PairResources res = cfg.make_resources();
    lm::Corpus corpus = load_scored_corpus(cfg);
    lm::FilterResult result = lm::run_filters(corpus, cfg.filter, res, cfg.threads);
    lm::save_corpus(result.corpus, out_prefix + ".src", out_prefix + ".tgt");
    if (!cfg.scores.empty()) lm::save_scores(result.corpus, out_prefix + ".scores");
    write_text(out_prefix + ".report.json", result.report.to_json());
    std::cerr << "[filter] kept " << result.report.retained << "/" << result.report.input
              << " pairs (report: " << out_prefix << ".report.json)\n";
    return 0;
}

int cmd_match(const lm::PipelineConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    lm::PairResources res = cfg.make_resources();
    lm::Lexicon lexicon = load_lexicon(cfg, res);
    lm::Corpus corpus = load_scored_corpus(cfg);

    lm::RetrieveOptions options;
    options.rank = !cfg.no_rank;
    options.threads = cfg.threads;
    std::vector<std::vector<std::string>> src_lemmas, tgt_lemmas;
    if (!cfg.src_lemmas.empty()) {
        src_lemmas = lm::load_lemma_sidecar(cfg.src_lemmas);
        options.source_lemmas = &src_lemmas;
    }
    if (!cfg.tgt_lemmas.empty()) {
        tgt_lemmas = lm::load_lemma_sidecar(cfg.tgt_lemmas);
        options.target_lemmas = &tgt_lemmas;
    }

    lm::RetrieveResult result = lm::retrieve(corpus, lexicon, cfg.k, res, options);
    fs::path dir(out_dir);
    lm::save_corpus(result.subset, dir / "subset.src", dir / "subset.tgt");
    write_text(dir / "coverage.json", result.coverage.to_json());
    lm::write_matches_jsonl(dir / "matches.jsonl", result, lexicon, res);
    std::cerr << "[match] selected " << result.subset.size() << "/" << corpus.size()
              << " pairs, covered " << result.coverage.covered.size() << "/" << lexicon.size()
              << " senses (k=" << cfg.k << ")\n";
    return 0;
}

int cmd_gaps(const lm::PipelineConfig& cfg, const std::string& coverage_path,
             const std::string& out_path) {
    lm::PairResources res = cfg.make_resources();
    lm::Lexicon lexicon = load_lexicon(cfg, res);
    lm::CoverageReport report = lm::CoverageReport::from_json(read_text(coverage_path));
    std::vector<const lm::SensePair*> gaps = lm::coverage_gaps(report, lexicon);
    lm::write_gaps_jsonl(gaps, res, out_path);
    std::cerr << "[gaps] " << gaps.size() << " senses need augmentation -> " << out_path << "\n";
    return 0;
}

int cmd_augment(const lm::PipelineConfig& cfg, const std::string& gaps_path,
                const std::string& out_dir) {
    fs::create_directories(out_dir);
    fs::path dir(out_dir);
    lm::PairResources res = cfg.make_resources();
    std::vector<lm::SensePair> senses = lm::read_gaps_jsonl(gaps_path);
    std::vector<const lm::SensePair*> gap_ptrs;
    for (const lm::SensePair& sense : senses) gap_ptrs.push_back(&sense);

    lm::PromptTemplate tmpl = cfg.augment.template_path.empty()
                                  ? lm::PromptTemplate::builtin()
                                  : lm::PromptTemplate::load(cfg.augment.template_path);
    std::vector<lm::AugmentPrompt> prompts = lm::render_prompts(gap_ptrs, tmpl, res);
    lm::write_prompts_jsonl(prompts, dir / "prompts.jsonl");

    std::vector<lm::LlmResult> results;
    if (cfg.augment.offline) {
        if (!cfg.augment.responses.empty()) {
            results = lm::read_responses_jsonl(cfg.augment.responses);
        } else {
            std::cerr << "[augment] offline: wrote " << prompts.size()
                      << " prompts; rerun with --responses to ingest completions\n";
        }
    } else {
        lm::ChatClient client(cfg.augment.endpoint);
        results = client.complete_batch(prompts);
        lm::write_responses_jsonl(results, dir / "responses.jsonl");
    }

    std::vector<lm::GeneratedPair> generated = lm::parse_and_validate(results, senses, res);
    if (!cfg.augment.offline && cfg.augment.retry_invalid) {
        std::vector<lm::AugmentPrompt> retry;
        for (std::size_t i = 0; i < generated.size(); ++i) {
            if (!generated[i].valid) retry.push_back(prompts[i]);
        }
        if (!retry.empty()) {
            lm::ChatClient client(cfg.augment.endpoint);
            std::vector<lm::GeneratedPair> second =
                lm::parse_and_validate(client.complete_batch(retry), senses, res);
            std::size_t cursor = 0;
            for (lm::GeneratedPair& pair : generated) {
                if (pair.valid) continue;
                if (second[cursor].valid) pair = second[cursor];
                ++cursor;
            }
        }
    }
    lm::write_augmented_jsonl(generated, dir / "augmented.jsonl");

    std::size_t valid = 0;
    for (const lm::GeneratedPair& pair : generated) valid += pair.valid ? 1 : 0;
    std::cerr << "[augment] " << valid << "/" << generated.size() << " valid generated pairs\n";
    return 0;
}

int cmd_build_sft(const lm::PipelineConfig& cfg, const std::string& subset_dir,
                  const std::string& augmented_path, const std::string& out_path) {
    fs::path dir(subset_dir);
    lm::Corpus subset =
        lm::load_corpus(dir / "subset.src", dir / "subset.tgt", cfg.source_lang, cfg.target_lang);
    std::vector<lm::LoadedMatchRecord> records = lm::read_matches_jsonl(dir / "matches.jsonl");
    std::vector<lm::GeneratedPair> generated;
    if (!augmented_path.empty()) generated = lm::read_augmented_jsonl(augmented_path);

    lm::BuildConfig build = cfg.sft;
    build.rng_seed = cfg.seed;
    std::vector<lm::InstructionSample> constrained = lm::build_constrained(subset, records, build);
    std::vector<lm::InstructionSample> general = lm::build_general(subset, generated, build);

    std::vector<lm::InstructionSample> samples;
    if (build.constrained_replaces_general) {
        std::unordered_set<std::size_t> replaced;
        for (const auto& sample : constrained) replaced.insert(sample.subset_position);
        for (auto& sample : general) {
            if (!replaced.count(sample.subset_position)) samples.push_back(std::move(sample));
        }
    } else {
        samples = std::move(general);
    }
    const std::size_t general_count = samples.size();
    for (auto& sample : constrained) samples.push_back(std::move(sample));
    lm::emit_dataset(std::move(samples), cfg.seed, out_path);
    std::cerr << "[build-sft] " << general_count << " general + " << constrained.size()
              << " constrained samples -> " << out_path << "\n";
    return 0;
}

int cmd_stats(const lm::PipelineConfig& cfg, const std::string& out_dir,
              const std::string& compare_src) {
    fs::create_directories(out_dir);
    fs::path dir(out_dir);
    lm::PairResources res = cfg.make_resources();

    std::vector<std::string> src_lines = lm::read_lines(cfg.src);
    std::vector<std::string> tgt_lines = lm::read_lines(cfg.tgt);
    lm::FrequencyProfile src_profile =
        lm::frequency_profile(src_lines, res.source.tokenizer, cfg.threads);
    lm::FrequencyProfile tgt_profile =
        lm::frequency_profile(tgt_lines, res.target.tokenizer, cfg.threads);
    lm::write_profile_csv(src_profile, dir / "freq_src.csv");
    lm::write_profile_csv(tgt_profile, dir / "freq_tgt.csv");

    if (!compare_src.empty()) {
        lm::FrequencyProfile other = lm::frequency_profile(lm::read_lines(compare_src),
                                                           res.source.tokenizer, cfg.threads);
        lm::ProfileComparison comparison = lm::compare_profiles(src_profile, other);
        write_text(dir / "comparison_summary.json", comparison.to_json());
        lm::write_rank_logfreq_csv(src_profile, other, dir / "rank_logfreq.csv");
    }

    if (!cfg.dict.empty()) {
        lm::Lexicon lexicon = load_lexicon(cfg, res);
        lm::Corpus corpus = load_scored_corpus(cfg);
        lm::RetrieveOptions options;
        options.rank = !cfg.no_rank;
        options.threads = cfg.threads;
        std::vector<int> ks = cfg.stats_ks;
        std::sort(ks.begin(), ks.end());
        std::vector<lm::SubsetSizeRow> rows =
            lm::subset_size_table(corpus, lexicon, ks, res, options);
        lm::write_subset_sizes_csv(rows, corpus.size(), dir / "subset_sizes.csv");
    }
    std::cerr << "[stats] " << src_profile.unique_types << " source types / "
              << tgt_profile.unique_types << " target types -> " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lexmatcher: dictionary-pivoted parallel-corpus curation"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalArgs global;
    app.add_option("--config", global.config_path, "TOML config file with per-stage sections")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", global.seed, "RNG seed (overrides run.seed)");
    app.add_option("--threads", global.threads, "worker threads, 0 = hardware (overrides run.threads)");
    app.add_option("--src-lang", global.src_lang, "source language tag (e.g. en)");
    app.add_option("--tgt-lang", global.tgt_lang, "target language tag (e.g. zh)");

    // Per-subcommand path/flag overrides, applied on top of the config file.
    std::string src, tgt, scores, dict, entities, stopwords_src, stopwords_tgt;
    std::string src_lemmas, tgt_lemmas;
    std::string out_prefix, out_dir, out_path, coverage_path, gaps_path, subset_dir;
    std::string augmented_path, template_path, responses_path, endpoint, model, compare_src;
    std::vector<int> ks;
    int k = -1;
    bool no_rank = false, offline = false, online = false, retry_invalid = false, force = false;

    auto add_corpus_opts = [&](CLI::App* sub) {
        sub->add_option("--src", src, "source-side corpus file");
        sub->add_option("--tgt", tgt, "target-side corpus file");
        sub->add_option("--scores", scores, "sidecar quality-score file");
    };
    auto add_lexicon_opts = [&](CLI::App* sub) {
        sub->add_option("--dict", dict, "dictionary TSV");
        sub->add_option("--entities", entities, "entity title TSV");
        sub->add_option("--stopwords-src", stopwords_src, "source stopword list");
        sub->add_option("--stopwords-tgt", stopwords_tgt, "target stopword list");
    };

    CLI::App* filter_cmd = app.add_subcommand("filter", "rule-based and quality filtering");
    add_corpus_opts(filter_cmd);
    filter_cmd->add_option("--stopwords-src", stopwords_src, "source stopword list");
    filter_cmd->add_option("--stopwords-tgt", stopwords_tgt, "target stopword list");
    filter_cmd->add_option("--out-prefix", out_prefix, "output prefix for .src/.tgt/.scores/.report.json")
        ->required();

    CLI::App* match_cmd = app.add_subcommand("match", "dictionary-guided subset retrieval");
    add_corpus_opts(match_cmd);
    add_lexicon_opts(match_cmd);
    match_cmd->add_option("--k", k, "per-sense context budget K");
    match_cmd->add_flag("--no-rank", no_rank, "keep raw corpus order instead of quality ranking");
    match_cmd->add_option("--src-lemmas", src_lemmas, "pre-lemmatized source sidecar");
    match_cmd->add_option("--tgt-lemmas", tgt_lemmas, "pre-lemmatized target sidecar");
    match_cmd->add_option("--out-dir", out_dir, "output directory")->required();

    CLI::App* gaps_cmd = app.add_subcommand("gaps", "polysemous senses missing from the subset");
    add_lexicon_opts(gaps_cmd);
    gaps_cmd->add_option("--coverage", coverage_path, "coverage.json from match")->required();
    gaps_cmd->add_option("--out", out_path, "gaps.jsonl output")->required();

    CLI::App* augment_cmd = app.add_subcommand("augment", "demonstration synthesis for gap senses");
    augment_cmd->add_option("--gaps", gaps_path, "gaps.jsonl from the gaps step")->required();
    augment_cmd->add_option("--out-dir", out_dir, "output directory")->required();
    augment_cmd->add_flag("--offline", offline, "write prompts.jsonl only (default)");
    augment_cmd->add_option("--endpoint", endpoint, "chat-completions endpoint URL (goes online)");
    augment_cmd->add_option("--model", model, "model name for the endpoint");
    augment_cmd->add_option("--responses", responses_path, "responses.jsonl to ingest offline");
    augment_cmd->add_option("--template", template_path, "prompt template file");
    augment_cmd->add_flag("--retry-invalid", retry_invalid, "re-queue invalid generations once");

    CLI::App* sft_cmd = app.add_subcommand("build-sft", "emit the instruction-tuning dataset");
    sft_cmd->add_option("--subset-dir", subset_dir, "directory with subset.src/.tgt + matches.jsonl")
        ->required();
    sft_cmd->add_option("--augmented", augmented_path, "augmented.jsonl from the augment step");
    sft_cmd->add_option("--out", out_path, "train.jsonl output")->required();

    CLI::App* stats_cmd = app.add_subcommand("stats", "frequency profiles and subset-size table");
    add_corpus_opts(stats_cmd);
    add_lexicon_opts(stats_cmd);
    stats_cmd->add_option("--ks", ks, "K values for the subset-size table");
    stats_cmd->add_option("--compare-src", compare_src, "second corpus side to compare against");
    stats_cmd->add_option("--out-dir", out_dir, "output directory")->required();

    CLI::App* pipeline_cmd = app.add_subcommand("pipeline", "run all stages with resume manifests");
    pipeline_cmd->add_option("--out-dir", out_dir, "output directory")->required();
    pipeline_cmd->add_flag("--force", force, "re-run stages even when up-to-date");

    CLI11_PARSE(app, argc, argv);

    try {
        lm::PipelineConfig cfg = effective_config(global);
        if (!src.empty()) cfg.src = src;
        if (!tgt.empty()) cfg.tgt = tgt;
        if (!scores.empty()) cfg.scores = scores;
        if (!dict.empty()) cfg.dict = dict;
        if (!entities.empty()) cfg.entities = entities;
        if (!stopwords_src.empty()) cfg.stopwords_src = stopwords_src;
        if (!stopwords_tgt.empty()) cfg.stopwords_tgt = stopwords_tgt;
        if (!src_lemmas.empty()) cfg.src_lemmas = src_lemmas;
        if (!tgt_lemmas.empty()) cfg.tgt_lemmas = tgt_lemmas;
        if (k >= 0) cfg.k = k;
        if (no_rank) cfg.no_rank = true;
        if (!template_path.empty()) cfg.augment.template_path = template_path;
        if (!responses_path.empty()) cfg.augment.responses = responses_path;
        if (retry_invalid) cfg.augment.retry_invalid = true;
        if (!endpoint.empty()) {
            cfg.augment.endpoint.url = endpoint;
            cfg.augment.offline = false;
        }
        if (!model.empty()) cfg.augment.endpoint.model = model;
        if (offline) cfg.augment.offline = true;
        online = !cfg.augment.offline;
        if (online && cfg.augment.endpoint.url.empty()) {
            throw lm::ConfigError("online augmentation needs --endpoint (or augment.endpoint)");
        }
        if (!ks.empty()) cfg.stats_ks = ks;

        if (filter_cmd->parsed()) return cmd_filter(cfg, out_prefix);
        if (match_cmd->parsed()) return cmd_match(cfg, out_dir);
        if (gaps_cmd->parsed()) return cmd_gaps(cfg, coverage_path, out_path);
        if (augment_cmd->parsed()) return cmd_augment(cfg, gaps_path, out_dir);
        if (sft_cmd->parsed()) return cmd_build_sft(cfg, subset_dir, augmented_path, out_path);
        if (stats_cmd->parsed()) return cmd_stats(cfg, out_dir, compare_src);
        if (pipeline_cmd->parsed()) {
            lm::Pipeline pipeline(cfg, out_dir, force, std::cerr);
            pipeline.run();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
