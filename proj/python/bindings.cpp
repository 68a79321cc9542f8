#include "lexmatcher/augment.hpp"
#include "lexmatcher/error.hpp"
#include "lexmatcher/filter.hpp"
#include "lexmatcher/matcher.hpp"
#include "lexmatcher/pipeline.hpp"
#include "lexmatcher/sft.hpp"
#include "lexmatcher/stats.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace lexmatcher;

namespace {

PairResources make_resources(const std::string& src_lang, const std::string& tgt_lang,
                             const std::vector<std::string>& stopwords_src,
                             const std::vector<std::string>& stopwords_tgt) {
    PairResources res;
    res.source = LangResources::for_language(src_lang);
    res.target = LangResources::for_language(tgt_lang);
    for (const std::string& word : stopwords_src) {
        res.source.stopwords.insert(res.source.lemmatizer.lemmatize(word));
    }
    for (const std::string& word : stopwords_tgt) {
        res.target.stopwords.insert(res.target.lemmatizer.lemmatize(word));
    }
    return res;
}

} // namespace

PYBIND11_MODULE(_lexmatcher, m) {
    m.doc() = "Dictionary-pivoted parallel-corpus curation (native core)";

    py::register_exception<Error>(m, "LexmatcherError");

    py::class_<SentencePair>(m, "SentencePair")
        .def(py::init([](std::uint64_t index, std::string source, std::string target,
                         std::optional<double> score) {
                 return SentencePair{index, std::move(source), std::move(target), score};
             }),
             py::arg("index"), py::arg("source_text"), py::arg("target_text"),
             py::arg("quality_score") = std::nullopt)
        .def_readwrite("index", &SentencePair::index)
        .def_readwrite("source_text", &SentencePair::source_text)
        .def_readwrite("target_text", &SentencePair::target_text)
        .def_readwrite("quality_score", &SentencePair::quality_score)
        .def("__repr__", [](const SentencePair& p) {
            return "<SentencePair " + std::to_string(p.index) + ">";
        });

    py::class_<Corpus>(m, "Corpus")
        .def(py::init<>())
        .def_readwrite("pairs", &Corpus::pairs)
        .def_readwrite("source_lang", &Corpus::source_lang)
        .def_readwrite("target_lang", &Corpus::target_lang)
        .def("__len__", &Corpus::size);

    py::enum_<ScoreScale>(m, "ScoreScale")
        .value("UNIT", ScoreScale::Unit)
        .value("PERCENT", ScoreScale::Percent);

    py::enum_<DedupKey>(m, "DedupKey")
        .value("PAIR", DedupKey::Pair)
        .value("SOURCE", DedupKey::Source)
        .value("TARGET", DedupKey::Target);

    m.def("load_corpus", &load_corpus, py::arg("source_path"), py::arg("target_path"),
          py::arg("source_lang") = "en", py::arg("target_lang") = "de");
    m.def("attach_scores", &attach_scores, py::arg("corpus"), py::arg("scores_path"),
          py::arg("scale") = ScoreScale::Percent);
    m.def("deduplicate", &deduplicate, py::arg("corpus"), py::arg("key") = DedupKey::Pair);
    m.def("save_corpus", &save_corpus, py::arg("corpus"), py::arg("source_path"),
          py::arg("target_path"));

    py::class_<PairResources>(m, "PairResources");
    m.def("make_resources", &make_resources, py::arg("src_lang"), py::arg("tgt_lang"),
          py::arg("stopwords_src") = std::vector<std::string>{},
          py::arg("stopwords_tgt") = std::vector<std::string>{});

    py::class_<Rational>(m, "Rational")
        .def_static("parse", &Rational::parse)
        .def_readwrite("num", &Rational::num)
        .def_readwrite("den", &Rational::den)
        .def("__float__", &Rational::to_double)
        .def("__repr__", [](const Rational& r) { return "<Rational " + r.str() + ">"; });

    py::class_<FilterConfig>(m, "FilterConfig")
        .def(py::init<>())
        .def_readwrite("max_words", &FilterConfig::max_words)
        .def_readwrite("max_word_chars", &FilterConfig::max_word_chars)
        .def_readwrite("min_len_ratio", &FilterConfig::min_len_ratio)
        .def_readwrite("max_len_ratio", &FilterConfig::max_len_ratio)
        .def_readwrite("max_repeat_ratio", &FilterConfig::max_repeat_ratio)
        .def_readwrite("content_word_lo", &FilterConfig::content_word_lo)
        .def_readwrite("content_word_hi", &FilterConfig::content_word_hi)
        .def_readwrite("min_quality", &FilterConfig::min_quality)
        .def_readwrite("content_rule_inverted", &FilterConfig::content_rule_inverted)
        .def_readwrite("dedup_key", &FilterConfig::dedup_key);

    py::class_<FilterReport>(m, "FilterReport")
        .def_readonly("input", &FilterReport::input)
        .def_readonly("retained", &FilterReport::retained)
        .def_readonly("duplicate", &FilterReport::duplicate)
        .def_readonly("length", &FilterReport::length)
        .def_readonly("empty_side", &FilterReport::empty_side)
        .def_readonly("ratio", &FilterReport::ratio)
        .def_readonly("repeat", &FilterReport::repeat)
        .def_readonly("content_words", &FilterReport::content_words)
        .def_readonly("quality", &FilterReport::quality)
        .def_readonly("missing_score", &FilterReport::missing_score)
        .def("to_json", &FilterReport::to_json);

    m.def(
        "run_filters",
        [](const Corpus& corpus, const FilterConfig& cfg, const PairResources& res, int threads) {
            FilterResult result = run_filters(corpus, cfg, res, threads);
            return py::make_tuple(result.corpus, result.report);
        },
        py::arg("corpus"), py::arg("config"), py::arg("resources"), py::arg("threads") = 1);

    py::enum_<Pos>(m, "Pos")
        .value("NOUN", Pos::Noun)
        .value("VERB", Pos::Verb)
        .value("ADJ", Pos::Adj)
        .value("ADV", Pos::Adv)
        .value("OTHER", Pos::Other);

    py::class_<SensePair>(m, "SensePair")
        .def_readonly("source_segment", &SensePair::source_segment)
        .def_readonly("target_segment", &SensePair::target_segment)
        .def_readonly("pos", &SensePair::pos)
        .def_readonly("sense_id", &SensePair::sense_id)
        .def_readonly("definition", &SensePair::definition)
        .def("source_key", &SensePair::source_key)
        .def("target_key", &SensePair::target_key);

    py::class_<Lexicon>(m, "Lexicon")
        .def("__len__", &Lexicon::size)
        .def_property_readonly("entries", &Lexicon::entries)
        .def("lookup", &Lexicon::lookup, py::return_value_policy::reference_internal)
        .def("max_source_len", &Lexicon::max_source_len);

    m.def("load_dictionary", &load_dictionary, py::arg("path"), py::arg("resources"),
          py::arg("max_segment_len") = 8);
    m.def("merge_entities", &merge_entities, py::arg("lexicon"), py::arg("titles_path"),
          py::arg("resources"));
    m.def(
        "candidate_segments",
        [](const std::vector<std::string>& lemmas, const PairResources& res, std::size_t max_len) {
            std::vector<std::tuple<std::size_t, std::size_t, std::string>> out;
            for (const CandidateSegment& c : candidate_segments(lemmas, res.source.stopwords, max_len)) {
                out.emplace_back(c.position, c.length, c.key);
            }
            return out;
        },
        py::arg("lemmas"), py::arg("resources"), py::arg("max_len") = 2);

    py::class_<CoverageReport>(m, "CoverageReport")
        .def_readonly("k", &CoverageReport::k)
        .def_readonly("subset_size", &CoverageReport::subset_size)
        .def_readonly("covered", &CoverageReport::covered)
        .def_readonly("uncovered", &CoverageReport::uncovered)
        .def_readonly("counts", &CoverageReport::counts)
        .def("to_json", &CoverageReport::to_json);

    py::class_<SenseMatch>(m, "SenseMatch")
        .def_readonly("sense", &SenseMatch::sense)
        .def_readonly("position", &SenseMatch::position)
        .def_readonly("length", &SenseMatch::length);

    py::class_<MatchRecord>(m, "MatchRecord")
        .def_readonly("pair_index", &MatchRecord::pair_index)
        .def_readonly("matched", &MatchRecord::matched)
        .def_readonly("selected", &MatchRecord::selected);

    m.def("rank_corpus", &rank_corpus, py::arg("corpus"));
    m.def(
        "retrieve",
        [](const Corpus& corpus, const Lexicon& lexicon, int k, const PairResources& res,
           bool rank, int threads) {
            RetrieveOptions options;
            options.rank = rank;
            options.threads = threads;
            RetrieveResult result = retrieve(corpus, lexicon, k, res, options);
            return py::make_tuple(result.subset, result.coverage, result.records);
        },
        py::arg("corpus"), py::arg("lexicon"), py::arg("k"), py::arg("resources"),
        py::arg("rank") = true, py::arg("threads") = 1);
    m.def(
        "coverage_gaps",
        [](const CoverageReport& report, const Lexicon& lexicon) {
            std::vector<SensePair> out;
            for (const SensePair* gap : coverage_gaps(report, lexicon)) out.push_back(*gap);
            return out;
        },
        py::arg("report"), py::arg("lexicon"));

    py::class_<PromptTemplate>(m, "PromptTemplate")
        .def_static("load", &PromptTemplate::load)
        .def_static("builtin", &PromptTemplate::builtin)
        .def_property_readonly("text", &PromptTemplate::text);

    py::class_<AugmentPrompt>(m, "AugmentPrompt")
        .def_readonly("sense_id", &AugmentPrompt::sense_id)
        .def_readonly("rendered_text", &AugmentPrompt::rendered_text);

    py::class_<LlmResult>(m, "LlmResult")
        .def(py::init([](std::string sense_id, std::string response, bool ok, std::string error) {
                 return LlmResult{std::move(sense_id), std::move(response), ok, std::move(error)};
             }),
             py::arg("sense_id"), py::arg("response"), py::arg("ok") = true,
             py::arg("error") = "")
        .def_readwrite("sense_id", &LlmResult::sense_id)
        .def_readwrite("response", &LlmResult::response)
        .def_readwrite("ok", &LlmResult::ok)
        .def_readwrite("error", &LlmResult::error);

    py::class_<GeneratedPair>(m, "GeneratedPair")
        .def_readonly("sense_id", &GeneratedPair::sense_id)
        .def_readonly("source_text", &GeneratedPair::source_text)
        .def_readonly("target_text", &GeneratedPair::target_text)
        .def_readonly("valid", &GeneratedPair::valid)
        .def_readonly("reason", &GeneratedPair::reason);

    m.def(
        "render_prompts",
        [](const std::vector<SensePair>& gaps, const PromptTemplate& tmpl,
           const PairResources& res) {
            std::vector<const SensePair*> ptrs;
            ptrs.reserve(gaps.size());
            for (const SensePair& gap : gaps) ptrs.push_back(&gap);
            return render_prompts(ptrs, tmpl, res);
        },
        py::arg("gaps"), py::arg("template"), py::arg("resources"));
    m.def("parse_and_validate", &parse_and_validate, py::arg("results"), py::arg("gap_senses"),
          py::arg("resources"));
    m.def("segment_in_text",
          [](const std::vector<std::string>& segment, const std::string& text,
             const PairResources& res, bool target_side) {
              return segment_in_text(segment, text, target_side ? res.target : res.source);
          },
          py::arg("segment_lemmas"), py::arg("text"), py::arg("resources"),
          py::arg("target_side") = false);
    m.def("write_prompts_jsonl", &write_prompts_jsonl, py::arg("prompts"), py::arg("path"));
    m.def("read_responses_jsonl", &read_responses_jsonl, py::arg("path"));
    m.def("write_augmented_jsonl", &write_augmented_jsonl, py::arg("pairs"), py::arg("path"));
    m.def("read_augmented_jsonl", &read_augmented_jsonl, py::arg("path"));

    py::class_<Constraint>(m, "Constraint")
        .def_readonly("source_surface", &Constraint::source_surface)
        .def_readonly("target_segment", &Constraint::target_segment);

    py::class_<InstructionSample>(m, "InstructionSample")
        .def_readonly("instruction", &InstructionSample::instruction)
        .def_readonly("input", &InstructionSample::input)
        .def_readonly("output", &InstructionSample::output)
        .def_readonly("constraints", &InstructionSample::constraints)
        .def_readonly("direction", &InstructionSample::direction);

    py::class_<BuildConfig>(m, "BuildConfig")
        .def(py::init<>())
        .def_readwrite("general_templates", &BuildConfig::general_templates)
        .def_readwrite("constrained_instruction", &BuildConfig::constrained_instruction)
        .def_readwrite("max_constrained_per_direction", &BuildConfig::max_constrained_per_direction)
        .def_readwrite("max_constraints_per_sample", &BuildConfig::max_constraints_per_sample)
        .def_readwrite("rng_seed", &BuildConfig::rng_seed)
        .def_readwrite("constrained_replaces_general", &BuildConfig::constrained_replaces_general);

    py::class_<MatchedSegment>(m, "MatchedSegment")
        .def_readonly("sense_id", &MatchedSegment::sense_id)
        .def_readonly("surface", &MatchedSegment::surface)
        .def_readonly("target_surface", &MatchedSegment::target_surface)
        .def_readonly("position", &MatchedSegment::position)
        .def_readonly("length", &MatchedSegment::length);

    py::class_<LoadedMatchRecord>(m, "LoadedMatchRecord")
        .def_readonly("pair_index", &LoadedMatchRecord::pair_index)
        .def_readonly("matched", &LoadedMatchRecord::matched);

    m.def("read_matches_jsonl", &read_matches_jsonl, py::arg("path"));
    m.def("build_general", &build_general, py::arg("subset"), py::arg("generated"),
          py::arg("config"));
    m.def("build_constrained", &build_constrained, py::arg("subset"), py::arg("records"),
          py::arg("config"));
    m.def("emit_dataset", &emit_dataset, py::arg("samples"), py::arg("rng_seed"),
          py::arg("out_path"));
    m.def("sample_constraints_ok", &sample_constraints_ok, py::arg("sample"), py::arg("resources"));

    py::class_<FrequencyEntry>(m, "FrequencyEntry")
        .def_readonly("rank", &FrequencyEntry::rank)
        .def_readonly("token", &FrequencyEntry::token)
        .def_readonly("count", &FrequencyEntry::count);

    py::class_<FrequencyProfile>(m, "FrequencyProfile")
        .def_readonly("table", &FrequencyProfile::table)
        .def_readonly("unique_types", &FrequencyProfile::unique_types)
        .def_readonly("total_tokens", &FrequencyProfile::total_tokens);

    py::class_<ProfileComparison>(m, "ProfileComparison")
        .def_readonly("unique_types_a", &ProfileComparison::unique_types_a)
        .def_readonly("unique_types_b", &ProfileComparison::unique_types_b)
        .def_readonly("total_tokens_a", &ProfileComparison::total_tokens_a)
        .def_readonly("total_tokens_b", &ProfileComparison::total_tokens_b)
        .def_readonly("head_mass_a", &ProfileComparison::head_mass_a)
        .def_readonly("head_mass_b", &ProfileComparison::head_mass_b);

    m.def(
        "frequency_profile",
        [](const std::vector<std::string>& sentences, const PairResources& res, bool target_side,
           int threads) {
            return frequency_profile(
                sentences, target_side ? res.target.tokenizer : res.source.tokenizer, threads);
        },
        py::arg("sentences"), py::arg("resources"), py::arg("target_side") = false,
        py::arg("threads") = 1);
    m.def("compare_profiles", &compare_profiles, py::arg("a"), py::arg("b"));
    m.def(
        "subset_size_table",
        [](const Corpus& corpus, const Lexicon& lexicon, const std::vector<int>& ks,
           const PairResources& res, bool rank, int threads) {
            RetrieveOptions options;
            options.rank = rank;
            options.threads = threads;
            std::vector<std::pair<int, std::uint64_t>> rows;
            for (const SubsetSizeRow& row : subset_size_table(corpus, lexicon, ks, res, options)) {
                rows.emplace_back(row.k, row.subset_size);
            }
            return rows;
        },
        py::arg("corpus"), py::arg("lexicon"), py::arg("ks"), py::arg("resources"),
        py::arg("rank") = true, py::arg("threads") = 1);
}
