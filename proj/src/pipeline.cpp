#include "lexmatcher/pipeline.hpp"

#include "lexmatcher/error.hpp"
#include "lexmatcher/manifest.hpp"
#include "lexmatcher/matcher.hpp"
#include "lexmatcher/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <unordered_set>

namespace lexmatcher {

ScoreScale parse_score_scale(std::string_view text) {
    if (text == "unit") return ScoreScale::Unit;
    if (text == "percent") return ScoreScale::Percent;
    throw ConfigError("score_scale must be 'unit' or 'percent', got '" + std::string(text) + "'");
}

DedupKey parse_dedup_key(std::string_view text) {
    if (text == "pair") return DedupKey::Pair;
    if (text == "source") return DedupKey::Source;
    if (text == "target") return DedupKey::Target;
    throw ConfigError("dedup_key must be 'pair', 'source' or 'target', got '" + std::string(text) +
                      "'");
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "paths.src", "paths.tgt", "paths.scores", "paths.dict", "paths.entities",
        "paths.stopwords_src", "paths.stopwords_tgt",
        "paths.lemma_exceptions_src", "paths.lemma_exceptions_tgt",
        "paths.src_lemmas", "paths.tgt_lemmas",
        "langs.source", "langs.target",
        "filter.max_words", "filter.max_word_chars", "filter.min_len_ratio",
        "filter.max_len_ratio", "filter.max_repeat_ratio", "filter.content_word_lo",
        "filter.content_word_hi", "filter.min_quality", "filter.content_rule_inverted",
        "filter.score_scale", "filter.dedup_key",
        "match.k", "match.no_rank", "match.max_segment_len",
        "augment.offline", "augment.template", "augment.responses", "augment.retry_invalid",
        "augment.endpoint", "augment.model", "augment.temperature", "augment.timeout_seconds",
        "augment.max_attempts", "augment.backoff_initial_ms", "augment.concurrency",
        "augment.api_key_env",
        "sft.general_templates", "sft.constrained_instruction", "sft.constraint_connector",
        "sft.max_constrained_per_direction", "sft.max_constraints_per_sample",
        "sft.constrained_replaces_general",
        "stats.ks",
        "run.seed", "run.threads",
    };
    return keys;
}

Rational get_rational(const TomlTable& table, const std::string& key, Rational fallback) {
    if (!table.has(key)) return fallback;
    // Exactness matters for boundary thresholds, so floats must be quoted.
    try {
        return Rational::parse(table.get_string(key));
    } catch (const ConfigError&) {
        std::int64_t v = table.get_int(key); // throws a typed message for floats
        return Rational{v, 1};
    }
}

} // namespace

PipelineConfig PipelineConfig::from_toml(const TomlTable& table) {
    for (const std::string& key : table.keys()) {
        if (!known_keys().count(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    PipelineConfig cfg;
    cfg.src = table.get_string("paths.src");
    cfg.tgt = table.get_string("paths.tgt");
    cfg.scores = table.get_string("paths.scores");
    cfg.dict = table.get_string("paths.dict");
    cfg.entities = table.get_string("paths.entities");
    cfg.stopwords_src = table.get_string("paths.stopwords_src");
    cfg.stopwords_tgt = table.get_string("paths.stopwords_tgt");
    cfg.lemma_exceptions_src = table.get_string("paths.lemma_exceptions_src");
    cfg.lemma_exceptions_tgt = table.get_string("paths.lemma_exceptions_tgt");
    cfg.src_lemmas = table.get_string("paths.src_lemmas");
    cfg.tgt_lemmas = table.get_string("paths.tgt_lemmas");

    cfg.source_lang = table.get_string("langs.source", cfg.source_lang);
    cfg.target_lang = table.get_string("langs.target", cfg.target_lang);

    cfg.filter.max_words = static_cast<int>(table.get_int("filter.max_words", cfg.filter.max_words));
    cfg.filter.max_word_chars =
        static_cast<int>(table.get_int("filter.max_word_chars", cfg.filter.max_word_chars));
    cfg.filter.min_len_ratio = get_rational(table, "filter.min_len_ratio", cfg.filter.min_len_ratio);
    cfg.filter.max_len_ratio = get_rational(table, "filter.max_len_ratio", cfg.filter.max_len_ratio);
    cfg.filter.max_repeat_ratio =
        get_rational(table, "filter.max_repeat_ratio", cfg.filter.max_repeat_ratio);
    cfg.filter.content_word_lo =
        get_rational(table, "filter.content_word_lo", cfg.filter.content_word_lo);
    cfg.filter.content_word_hi =
        get_rational(table, "filter.content_word_hi", cfg.filter.content_word_hi);
    cfg.filter.content_rule_inverted =
        table.get_bool("filter.content_rule_inverted", cfg.filter.content_rule_inverted);
    cfg.score_scale = parse_score_scale(table.get_string("filter.score_scale", "percent"));
    cfg.filter.dedup_key = parse_dedup_key(table.get_string("filter.dedup_key", "pair"));
    if (table.has("filter.min_quality")) {
        double q = table.get_double("filter.min_quality");
        cfg.filter.min_quality = cfg.score_scale == ScoreScale::Percent ? q / 100.0 : q;
    }

    cfg.k = static_cast<int>(table.get_int("match.k", cfg.k));
    cfg.no_rank = table.get_bool("match.no_rank", cfg.no_rank);
    cfg.max_segment_len =
        static_cast<int>(table.get_int("match.max_segment_len", cfg.max_segment_len));

    cfg.augment.offline = table.get_bool("augment.offline", cfg.augment.offline);
    cfg.augment.template_path = table.get_string("augment.template");
    cfg.augment.responses = table.get_string("augment.responses");
    cfg.augment.retry_invalid = table.get_bool("augment.retry_invalid", false);
    cfg.augment.endpoint.url = table.get_string("augment.endpoint");
    cfg.augment.endpoint.model = table.get_string("augment.model");
    cfg.augment.endpoint.temperature = table.get_double("augment.temperature", 0.0);
    cfg.augment.endpoint.timeout_seconds =
        static_cast<int>(table.get_int("augment.timeout_seconds", 60));
    cfg.augment.endpoint.max_attempts = static_cast<int>(table.get_int("augment.max_attempts", 3));
    cfg.augment.endpoint.backoff_initial_ms =
        static_cast<int>(table.get_int("augment.backoff_initial_ms", 1000));
    cfg.augment.endpoint.concurrency = static_cast<int>(table.get_int("augment.concurrency", 4));
    cfg.augment.endpoint.api_key_env =
        table.get_string("augment.api_key_env", "LEXMATCHER_API_KEY");

    cfg.sft.general_templates =
        table.get_string_array("sft.general_templates", cfg.sft.general_templates);
    cfg.sft.constrained_instruction =
        table.get_string("sft.constrained_instruction", cfg.sft.constrained_instruction);
    cfg.sft.constraint_connector =
        table.get_string("sft.constraint_connector", cfg.sft.constraint_connector);
    cfg.sft.max_constrained_per_direction = static_cast<int>(
        table.get_int("sft.max_constrained_per_direction", cfg.sft.max_constrained_per_direction));
    cfg.sft.max_constraints_per_sample = static_cast<int>(
        table.get_int("sft.max_constraints_per_sample", cfg.sft.max_constraints_per_sample));
    cfg.sft.constrained_replaces_general =
        table.get_bool("sft.constrained_replaces_general", cfg.sft.constrained_replaces_general);

    cfg.stats_ks.clear();
    for (std::int64_t k : table.get_int_array("stats.ks", {1, 2, 3})) {
        cfg.stats_ks.push_back(static_cast<int>(k));
    }

    cfg.seed = static_cast<std::uint64_t>(table.get_int("run.seed", 42));
    cfg.threads = static_cast<int>(table.get_int("run.threads", 0));
    return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    return from_toml(TomlTable::parse_file(path));
}

std::string PipelineConfig::canonical() const {
    std::string out;
    auto add = [&](std::string_view key, const std::string& value) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    };
    add("augment.api_key_env", augment.endpoint.api_key_env);
    add("augment.backoff_initial_ms", std::to_string(augment.endpoint.backoff_initial_ms));
    add("augment.concurrency", std::to_string(augment.endpoint.concurrency));
    add("augment.endpoint", augment.endpoint.url);
    add("augment.max_attempts", std::to_string(augment.endpoint.max_attempts));
    add("augment.model", augment.endpoint.model);
    add("augment.offline", augment.offline ? "true" : "false");
    add("augment.responses", augment.responses);
    add("augment.retry_invalid", augment.retry_invalid ? "true" : "false");
    add("augment.template", augment.template_path);
    {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.17g", augment.endpoint.temperature);
        add("augment.temperature", buf);
    }
    add("augment.timeout_seconds", std::to_string(augment.endpoint.timeout_seconds));
    add("filter.content_rule_inverted", filter.content_rule_inverted ? "true" : "false");
    add("filter.content_word_hi", filter.content_word_hi.str());
    add("filter.content_word_lo", filter.content_word_lo.str());
    add("filter.dedup_key", filter.dedup_key == DedupKey::Pair
                                ? "pair"
                                : filter.dedup_key == DedupKey::Source ? "source" : "target");
    add("filter.max_len_ratio", filter.max_len_ratio.str());
    add("filter.max_repeat_ratio", filter.max_repeat_ratio.str());
    add("filter.max_word_chars", std::to_string(filter.max_word_chars));
    add("filter.max_words", std::to_string(filter.max_words));
    {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.17g", filter.min_quality);
        add("filter.min_quality", buf);
    }
    add("filter.min_len_ratio", filter.min_len_ratio.str());
    add("filter.score_scale", score_scale == ScoreScale::Percent ? "percent" : "unit");
    add("langs.source", source_lang);
    add("langs.target", target_lang);
    add("match.k", std::to_string(k));
    add("match.max_segment_len", std::to_string(max_segment_len));
    add("match.no_rank", no_rank ? "true" : "false");
    add("paths.dict", dict);
    add("paths.entities", entities);
    add("paths.lemma_exceptions_src", lemma_exceptions_src);
    add("paths.lemma_exceptions_tgt", lemma_exceptions_tgt);
    add("paths.scores", scores);
    add("paths.src", src);
    add("paths.src_lemmas", src_lemmas);
    add("paths.stopwords_src", stopwords_src);
    add("paths.stopwords_tgt", stopwords_tgt);
    add("paths.tgt", tgt);
    add("paths.tgt_lemmas", tgt_lemmas);
    add("run.seed", std::to_string(seed));
    add("sft.constrained_instruction", sft.constrained_instruction);
    add("sft.constrained_replaces_general", sft.constrained_replaces_general ? "true" : "false");
    add("sft.constraint_connector", sft.constraint_connector);
    {
        std::string joined;
        for (const std::string& t : sft.general_templates) {
            if (!joined.empty()) joined += "\x1f";
            joined += t;
        }
        add("sft.general_templates", joined);
    }
    add("sft.max_constrained_per_direction", std::to_string(sft.max_constrained_per_direction));
    add("sft.max_constraints_per_sample", std::to_string(sft.max_constraints_per_sample));
    {
        std::string joined;
        for (int kv : stats_ks) {
            if (!joined.empty()) joined += ",";
            joined += std::to_string(kv);
        }
        add("stats.ks", joined);
    }
    return out;
}

PairResources PipelineConfig::make_resources() const {
    PairResources res;
    res.source = LangResources::for_language(source_lang);
    res.target = LangResources::for_language(target_lang);
    if (!lemma_exceptions_src.empty()) res.source.lemmatizer.load_exceptions(lemma_exceptions_src);
    if (!lemma_exceptions_tgt.empty()) res.target.lemmatizer.load_exceptions(lemma_exceptions_tgt);
    if (!stopwords_src.empty()) {
        res.source.stopwords = StopwordSet::load(stopwords_src, res.source.lemmatizer);
    }
    if (!stopwords_tgt.empty()) {
        res.target.stopwords = StopwordSet::load(stopwords_tgt, res.target.lemmatizer);
    }
    return res;
}

void PipelineConfig::validate_paths(bool require_corpus) const {
    auto check = [](std::string_view what, const std::string& path, bool required) {
        if (path.empty()) {
            if (required) throw ConfigError("missing required path: " + std::string(what));
            return;
        }
        if (!std::filesystem::exists(path)) {
            throw ConfigError(std::string(what) + " not found: " + path);
        }
    };
    check("paths.src", src, require_corpus);
    check("paths.tgt", tgt, require_corpus);
    check("paths.scores", scores, false);
    check("paths.dict", dict, require_corpus);
    check("paths.entities", entities, false);
    check("paths.stopwords_src", stopwords_src, false);
    check("paths.stopwords_tgt", stopwords_tgt, false);
    check("paths.lemma_exceptions_src", lemma_exceptions_src, false);
    check("paths.lemma_exceptions_tgt", lemma_exceptions_tgt, false);
    check("paths.src_lemmas", src_lemmas, false);
    check("paths.tgt_lemmas", tgt_lemmas, false);
    check("augment.template", augment.template_path, false);
    check("augment.responses", augment.responses, false);
}

void write_gaps_jsonl(const std::vector<const SensePair*>& gaps, const PairResources& res,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const SensePair* sense : gaps) {
        nlohmann::ordered_json j;
        j["sense_id"] = sense->sense_id;
        j["source_segment"] = sense->source_key();
        j["target_segment"] = sense->target_key();
        j["source_display"] = res.source.tokenizer.join(sense->source_segment);
        j["target_display"] = res.target.tokenizer.join(sense->target_segment);
        j["pos"] = std::string(pos_name(sense->pos));
        j["definition"] = sense->definition;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

std::vector<SensePair> read_gaps_jsonl(const std::filesystem::path& path) {
    Tokenizer ws(TokenizerMode::Whitespace);
    std::vector<SensePair> senses;
    std::size_t line_no = 0;
    for (const std::string& line : read_lines(path)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string(), line_no, e.what());
        }
        SensePair sense;
        sense.sense_id = j.at("sense_id").get<std::string>();
        sense.source_segment = ws.tokenize(j.at("source_segment").get<std::string>());
        sense.target_segment = ws.tokenize(j.at("target_segment").get<std::string>());
        sense.pos = parse_pos(j.value("pos", "other"));
        sense.has_pos = true;
        sense.definition = j.value("definition", std::string());
        senses.push_back(std::move(sense));
    }
    return senses;
}

Pipeline::Pipeline(PipelineConfig config, std::filesystem::path out_dir, bool force,
                   std::ostream& log)
    : config_(std::move(config)), out_dir_(std::move(out_dir)),
      manifest_dir_(out_dir_ / "manifests"), force_(force), log_(log) {
    config_digest_ = digest_text(config_.canonical());
    resources_ = config_.make_resources();
    std::filesystem::create_directories(manifest_dir_);
}

std::map<std::string, std::string> Pipeline::digest_inputs(
    const std::vector<std::string>& paths) const {
    std::map<std::string, std::string> digests;
    for (const std::string& path : paths) {
        if (!path.empty()) digests[path] = digest_file(path);
    }
    return digests;
}

bool Pipeline::should_run(const std::string& stage,
                          const std::map<std::string, std::string>& inputs) {
    if (force_) return true;
    if (stage_is_current(manifest_dir_ / (stage + ".json"), stage, inputs, config_digest_)) {
        log_ << "[" << stage << "] up-to-date\n";
        return false;
    }
    return true;
}

void Pipeline::finish(const std::string& stage, const std::map<std::string, std::string>& inputs,
                      const std::vector<std::filesystem::path>& outputs) {
    StageManifest manifest;
    manifest.stage = stage;
    manifest.inputs = inputs;
    manifest.config_digest = config_digest_;
    for (const auto& output : outputs) manifest.outputs[output.string()] = digest_file(output);
    manifest.save(manifest_dir_ / (stage + ".json"));
}

const Lexicon& Pipeline::lexicon() {
    if (!lexicon_) {
        lexicon_ = load_dictionary(config_.dict, resources_, config_.max_segment_len);
        if (!config_.entities.empty()) {
            merge_entities(*lexicon_, config_.entities, resources_);
        }
    }
    return *lexicon_;
}

void Pipeline::run() {
    config_.validate_paths(true);
    run_filter();
    run_match();
    run_gaps();
    run_augment();
    run_build_sft();
    run_stats();
}

namespace {

std::vector<std::string> select_sidecar_lines(const std::vector<std::string>& lines,
                                              const Corpus& kept, const std::string& path) {
    std::vector<std::string> out;
    out.reserve(kept.size());
    for (const SentencePair& pair : kept.pairs) {
        if (pair.index >= lines.size()) {
            throw AlignmentError("lemma sidecar " + path + " shorter than corpus");
        }
        out.push_back(lines[pair.index]);
    }
    return out;
}

void write_plain_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const std::string& line : lines) out << line << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

} // namespace

void Pipeline::run_filter() {
    auto inputs = digest_inputs({config_.src, config_.tgt, config_.scores, config_.stopwords_src,
                                 config_.stopwords_tgt, config_.lemma_exceptions_src,
                                 config_.lemma_exceptions_tgt, config_.src_lemmas,
                                 config_.tgt_lemmas});
    if (!should_run("filter", inputs)) return;

    Corpus corpus = load_corpus(config_.src, config_.tgt, config_.source_lang, config_.target_lang);
    if (!config_.scores.empty()) {
        corpus = attach_scores(std::move(corpus), config_.scores, config_.score_scale);
    }
    const std::size_t input_size = corpus.size();
    FilterResult result = run_filters(corpus, config_.filter, resources_, config_.threads);

    std::vector<std::filesystem::path> outputs;
    save_corpus(result.corpus, artifact("filtered.src"), artifact("filtered.tgt"));
    outputs.push_back(artifact("filtered.src"));
    outputs.push_back(artifact("filtered.tgt"));
    if (!config_.scores.empty()) {
        save_scores(result.corpus, artifact("filtered.scores"));
        outputs.push_back(artifact("filtered.scores"));
    }
    if (!config_.src_lemmas.empty()) {
        write_plain_lines(artifact("filtered.src.lemmas"),
                          select_sidecar_lines(read_lines(config_.src_lemmas), result.corpus,
                                               config_.src_lemmas));
        outputs.push_back(artifact("filtered.src.lemmas"));
    }
    if (!config_.tgt_lemmas.empty()) {
        write_plain_lines(artifact("filtered.tgt.lemmas"),
                          select_sidecar_lines(read_lines(config_.tgt_lemmas), result.corpus,
                                               config_.tgt_lemmas));
        outputs.push_back(artifact("filtered.tgt.lemmas"));
    }
    {
        std::ofstream out(artifact("filter_report.json"), std::ios::binary);
        if (!out) throw IoError("cannot write filter_report.json");
        out << result.report.to_json() << '\n';
    }
    outputs.push_back(artifact("filter_report.json"));

    log_ << "[filter] kept " << result.report.retained << "/" << input_size << " pairs\n";
    finish("filter", inputs, outputs);
}

void Pipeline::run_match() {
    std::vector<std::string> input_paths = {artifact("filtered.src").string(),
                                            artifact("filtered.tgt").string(), config_.dict,
                                            config_.entities, config_.stopwords_src,
                                            config_.lemma_exceptions_src,
                                            config_.lemma_exceptions_tgt};
    if (std::filesystem::exists(artifact("filtered.scores"))) {
        input_paths.push_back(artifact("filtered.scores").string());
    }
    if (!config_.src_lemmas.empty()) input_paths.push_back(artifact("filtered.src.lemmas").string());
    if (!config_.tgt_lemmas.empty()) input_paths.push_back(artifact("filtered.tgt.lemmas").string());
    auto inputs = digest_inputs(input_paths);
    if (!should_run("match", inputs)) return;

    Corpus corpus = load_corpus(artifact("filtered.src"), artifact("filtered.tgt"),
                                config_.source_lang, config_.target_lang);
    if (std::filesystem::exists(artifact("filtered.scores"))) {
        corpus = attach_scores(std::move(corpus), artifact("filtered.scores"), ScoreScale::Unit);
    }

    RetrieveOptions options;
    options.rank = !config_.no_rank;
    options.threads = config_.threads;
    std::vector<std::vector<std::string>> src_lemmas, tgt_lemmas;
    if (!config_.src_lemmas.empty()) {
        src_lemmas = load_lemma_sidecar(artifact("filtered.src.lemmas"));
        options.source_lemmas = &src_lemmas;
    }
    if (!config_.tgt_lemmas.empty()) {
        tgt_lemmas = load_lemma_sidecar(artifact("filtered.tgt.lemmas"));
        options.target_lemmas = &tgt_lemmas;
    }

    RetrieveResult result = retrieve(corpus, lexicon(), config_.k, resources_, options);

    save_corpus(result.subset, artifact("subset.src"), artifact("subset.tgt"));
    {
        std::ofstream out(artifact("coverage.json"), std::ios::binary);
        if (!out) throw IoError("cannot write coverage.json");
        out << result.coverage.to_json() << '\n';
    }
    write_matches_jsonl(artifact("matches.jsonl"), result, lexicon(), resources_);

    log_ << "[match] selected " << result.subset.size() << "/" << corpus.size() << " pairs, covered "
         << result.coverage.covered.size() << "/" << lexicon().size() << " senses (k=" << config_.k
         << ")\n";
    finish("match", inputs,
           {artifact("subset.src"), artifact("subset.tgt"), artifact("coverage.json"),
            artifact("matches.jsonl")});
}

void Pipeline::run_gaps() {
    auto inputs = digest_inputs({artifact("coverage.json").string(), config_.dict, config_.entities,
                                 config_.stopwords_src, config_.lemma_exceptions_src,
                                 config_.lemma_exceptions_tgt});
    if (!should_run("gaps", inputs)) return;

    std::ifstream in(artifact("coverage.json"), std::ios::binary);
    if (!in) throw IoError("cannot open coverage.json");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CoverageReport report = CoverageReport::from_json(text);

    std::vector<const SensePair*> gaps = coverage_gaps(report, lexicon());
    write_gaps_jsonl(gaps, resources_, artifact("gaps.jsonl"));

    log_ << "[gaps] " << gaps.size() << " uncovered polysemous noun/verb senses\n";
    finish("gaps", inputs, {artifact("gaps.jsonl")});
}

void Pipeline::run_augment() {
    std::vector<std::string> input_paths = {artifact("gaps.jsonl").string(),
                                            config_.augment.template_path,
                                            config_.augment.responses};
    auto inputs = digest_inputs(input_paths);
    if (!should_run("augment", inputs)) return;

    std::vector<SensePair> senses = read_gaps_jsonl(artifact("gaps.jsonl"));
    std::vector<const SensePair*> gap_ptrs;
    gap_ptrs.reserve(senses.size());
    for (const SensePair& sense : senses) gap_ptrs.push_back(&sense);

    PromptTemplate tmpl = config_.augment.template_path.empty()
                              ? PromptTemplate::builtin()
                              : PromptTemplate::load(config_.augment.template_path);
    std::vector<AugmentPrompt> prompts = render_prompts(gap_ptrs, tmpl, resources_);
    write_prompts_jsonl(prompts, artifact("prompts.jsonl"));

    std::vector<std::filesystem::path> outputs = {artifact("prompts.jsonl"),
                                                  artifact("augmented.jsonl")};
    std::vector<LlmResult> results;
    if (config_.augment.offline) {
        if (!config_.augment.responses.empty()) {
            results = read_responses_jsonl(config_.augment.responses);
        }
    } else {
        ChatClient client(config_.augment.endpoint);
        results = client.complete_batch(prompts);
        write_responses_jsonl(results, artifact("responses.jsonl"));
        outputs.push_back(artifact("responses.jsonl"));
    }

    std::vector<GeneratedPair> generated = parse_and_validate(results, senses, resources_);

    if (!config_.augment.offline && config_.augment.retry_invalid) {
        std::vector<AugmentPrompt> retry;
        for (std::size_t i = 0; i < generated.size(); ++i) {
            if (!generated[i].valid) retry.push_back(prompts[i]);
        }
        if (!retry.empty()) {
            ChatClient client(config_.augment.endpoint);
            std::vector<GeneratedPair> second =
                parse_and_validate(client.complete_batch(retry), senses, resources_);
            std::size_t cursor = 0;
            for (GeneratedPair& pair : generated) {
                if (pair.valid) continue;
                if (second[cursor].valid) pair = second[cursor];
                ++cursor;
            }
        }
    }

    write_augmented_jsonl(generated, artifact("augmented.jsonl"));

    std::size_t valid = 0;
    for (const GeneratedPair& pair : generated) valid += pair.valid ? 1 : 0;
    log_ << "[augment] " << prompts.size() << " prompts, " << results.size() << " responses, "
         << valid << " valid pairs" << (config_.augment.offline ? " (offline)" : "") << "\n";
    finish("augment", inputs, outputs);
}

void Pipeline::run_build_sft() {
    auto inputs = digest_inputs({artifact("subset.src").string(), artifact("subset.tgt").string(),
                                 artifact("matches.jsonl").string(),
                                 artifact("augmented.jsonl").string()});
    if (!should_run("build-sft", inputs)) return;

    Corpus subset = load_corpus(artifact("subset.src"), artifact("subset.tgt"),
                                config_.source_lang, config_.target_lang);
    std::vector<LoadedMatchRecord> records = read_matches_jsonl(artifact("matches.jsonl"));
    std::vector<GeneratedPair> generated = read_augmented_jsonl(artifact("augmented.jsonl"));

    BuildConfig build = config_.sft;
    build.rng_seed = config_.seed;

    std::vector<InstructionSample> constrained = build_constrained(subset, records, build);
    std::vector<InstructionSample> general = build_general(subset, generated, build);
    std::vector<InstructionSample> samples;
    if (build.constrained_replaces_general) {
        std::unordered_set<std::size_t> replaced;
        for (const InstructionSample& sample : constrained) replaced.insert(sample.subset_position);
        for (InstructionSample& sample : general) {
            if (!replaced.count(sample.subset_position)) samples.push_back(std::move(sample));
        }
    } else {
        samples = std::move(general);
    }
    std::size_t general_count = samples.size();
    for (InstructionSample& sample : constrained) samples.push_back(std::move(sample));

    emit_dataset(std::move(samples), config_.seed, artifact("train.jsonl"));

    log_ << "[build-sft] " << general_count << " general + " << constrained.size()
         << " constrained samples\n";
    finish("build-sft", inputs, {artifact("train.jsonl")});
}

void Pipeline::run_stats() {
    std::vector<std::string> input_paths = {artifact("subset.src").string(),
                                            artifact("subset.tgt").string(),
                                            artifact("filtered.src").string(),
                                            artifact("filtered.tgt").string(), config_.dict,
                                            config_.entities};
    if (std::filesystem::exists(artifact("filtered.scores"))) {
        input_paths.push_back(artifact("filtered.scores").string());
    }
    auto inputs = digest_inputs(input_paths);
    if (!should_run("stats", inputs)) return;

    Corpus subset = load_corpus(artifact("subset.src"), artifact("subset.tgt"),
                                config_.source_lang, config_.target_lang);
    std::vector<std::string> src_lines, tgt_lines;
    src_lines.reserve(subset.size());
    tgt_lines.reserve(subset.size());
    for (const SentencePair& pair : subset.pairs) {
        src_lines.push_back(pair.source_text);
        tgt_lines.push_back(pair.target_text);
    }
    FrequencyProfile src_profile =
        frequency_profile(src_lines, resources_.source.tokenizer, config_.threads);
    FrequencyProfile tgt_profile =
        frequency_profile(tgt_lines, resources_.target.tokenizer, config_.threads);
    write_profile_csv(src_profile, artifact("freq_src.csv"));
    write_profile_csv(tgt_profile, artifact("freq_tgt.csv"));

    Corpus filtered = load_corpus(artifact("filtered.src"), artifact("filtered.tgt"),
                                  config_.source_lang, config_.target_lang);
    if (std::filesystem::exists(artifact("filtered.scores"))) {
        filtered = attach_scores(std::move(filtered), artifact("filtered.scores"), ScoreScale::Unit);
    }
    RetrieveOptions options;
    options.rank = !config_.no_rank;
    options.threads = config_.threads;
    std::vector<int> ks = config_.stats_ks;
    std::sort(ks.begin(), ks.end());
    std::vector<SubsetSizeRow> rows = subset_size_table(filtered, lexicon(), ks, resources_, options);
    write_subset_sizes_csv(rows, filtered.size(), artifact("subset_sizes.csv"));

    log_ << "[stats] " << src_profile.unique_types << " source types, " << tgt_profile.unique_types
         << " target types over " << subset.size() << " subset pairs\n";
    finish("stats", inputs,
           {artifact("freq_src.csv"), artifact("freq_tgt.csv"), artifact("subset_sizes.csv")});
}

} // namespace lexmatcher
