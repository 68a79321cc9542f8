#include "lexmatcher/sft.hpp"

#include "lexmatcher/error.hpp"
#include "lexmatcher/rng.hpp"
#include "lexmatcher/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace lexmatcher {

void BuildConfig::validate() const {
    if (general_templates.empty()) {
        throw ConfigError("sft.general_templates must contain at least one template");
    }
    if (constrained_instruction.empty()) {
        throw ConfigError("sft.constrained_instruction must not be empty");
    }
    if (max_constrained_per_direction < 0) {
        throw ConfigError("sft.max_constrained_per_direction must be >= 0");
    }
    if (max_constraints_per_sample < 1) {
        throw ConfigError("sft.max_constraints_per_sample must be >= 1");
    }
}

namespace {

std::string expand_langs(std::string text, const std::string& src_lang,
                         const std::string& tgt_lang) {
    auto replace = [&](std::string_view from, const std::string& to) {
        std::size_t pos = 0;
        while ((pos = text.find(from, pos)) != std::string::npos) {
            text.replace(pos, from.size(), to);
            pos += to.size();
        }
    };
    replace("{SRC}", language_name(src_lang));
    replace("{TGT}", language_name(tgt_lang));
    return text;
}

} // namespace

std::vector<InstructionSample> build_general(const Corpus& subset,
                                             const std::vector<GeneratedPair>& generated,
                                             const BuildConfig& cfg) {
    cfg.validate();
    std::vector<std::string> templates;
    templates.reserve(cfg.general_templates.size());
    for (const std::string& t : cfg.general_templates) {
        templates.push_back(expand_langs(t, subset.source_lang, subset.target_lang));
    }

    DeterministicRng rng(cfg.rng_seed);
    std::size_t offset = static_cast<std::size_t>(rng.next_below(templates.size()));
    const std::string direction = subset.source_lang + "-" + subset.target_lang;

    std::vector<InstructionSample> samples;
    samples.reserve(subset.size() + generated.size());
    std::size_t i = 0;
    auto add = [&](const std::string& input, const std::string& output, std::size_t position) {
        InstructionSample sample;
        sample.instruction = templates[(offset + i) % templates.size()];
        sample.input = input;
        sample.output = output;
        sample.direction = direction;
        sample.subset_position = position;
        samples.push_back(std::move(sample));
        ++i;
    };
    for (std::size_t p = 0; p < subset.pairs.size(); ++p) {
        add(subset.pairs[p].source_text, subset.pairs[p].target_text, p);
    }
    for (const GeneratedPair& pair : generated) {
        if (pair.valid) add(pair.source_text, pair.target_text, static_cast<std::size_t>(-1));
    }
    return samples;
}

std::vector<InstructionSample> build_constrained(const Corpus& subset,
                                                 const std::vector<LoadedMatchRecord>& records,
                                                 const BuildConfig& cfg) {
    cfg.validate();
    if (records.size() != subset.size()) {
        throw AlignmentError("match records (" + std::to_string(records.size()) +
                             ") do not align with subset pairs (" +
                             std::to_string(subset.size()) + ")");
    }

    std::vector<std::size_t> eligible;
    eligible.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].matched.empty()) eligible.push_back(i);
    }

    DeterministicRng rng(cfg.rng_seed);
    const std::size_t cap = static_cast<std::size_t>(cfg.max_constrained_per_direction);
    std::vector<std::size_t> chosen;
    if (eligible.size() <= cap) {
        chosen = std::move(eligible);
    } else {
        for (std::size_t slot : rng.sample_indices(eligible.size(), cap)) {
            chosen.push_back(eligible[slot]);
        }
    }

    const std::string instruction =
        expand_langs(cfg.constrained_instruction, subset.source_lang, subset.target_lang);
    const std::string direction = subset.source_lang + "-" + subset.target_lang;

    std::vector<InstructionSample> samples;
    samples.reserve(chosen.size());
    for (std::size_t idx : chosen) {
        const LoadedMatchRecord& record = records[idx];

        // Distinct segment pairs only; a sense matched at two positions is
        // still one constraint candidate.
        std::vector<const MatchedSegment*> candidates;
        for (const MatchedSegment& seg : record.matched) {
            bool dup = false;
            for (const MatchedSegment* kept : candidates) {
                if (kept->source_segment == seg.source_segment &&
                    kept->target_segment == seg.target_segment) {
                    dup = true;
                    break;
                }
            }
            if (!dup) candidates.push_back(&seg);
        }

        std::vector<const MatchedSegment*> picked;
        const std::size_t want = static_cast<std::size_t>(cfg.max_constraints_per_sample);
        if (candidates.size() <= want) {
            picked = std::move(candidates);
        } else {
            for (std::size_t slot : rng.sample_indices(candidates.size(), want)) {
                picked.push_back(candidates[slot]);
            }
        }

        InstructionSample sample;
        std::string clauses;
        for (const MatchedSegment* seg : picked) {
            sample.constraints.push_back({seg->surface, seg->target_surface});
            if (!clauses.empty()) clauses.push_back(' ');
            clauses += "\"" + seg->surface + "\" " + cfg.constraint_connector + " \"" +
                       seg->target_surface + "\".";
        }
        sample.instruction = clauses + " " + instruction;
        sample.input = subset.pairs[idx].source_text;
        sample.output = subset.pairs[idx].target_text;
        sample.direction = direction;
        sample.subset_position = idx;
        samples.push_back(std::move(sample));
    }
    return samples;
}

void emit_dataset(std::vector<InstructionSample> samples, std::uint64_t rng_seed,
                  const std::filesystem::path& out_path) {
    DeterministicRng rng(rng_seed);
    rng.shuffle(samples);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_path.string());
    for (const InstructionSample& sample : samples) {
        nlohmann::ordered_json j;
        j["instruction"] = sample.instruction;
        j["input"] = sample.input;
        j["output"] = sample.output;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failure on " + out_path.string());
}

bool sample_constraints_ok(const InstructionSample& sample, const PairResources& res) {
    for (const Constraint& constraint : sample.constraints) {
        std::vector<std::string> src_lemmas = res.source.lemmatizer.lemmatize_all(
            res.source.tokenizer.tokenize(constraint.source_surface));
        std::vector<std::string> tgt_lemmas = res.target.lemmatizer.lemmatize_all(
            res.target.tokenizer.tokenize(constraint.target_segment));
        if (!segment_in_text(src_lemmas, sample.input, res.source)) return false;
        if (!segment_in_text(tgt_lemmas, sample.output, res.target)) return false;
    }
    return true;
}

} // namespace lexmatcher
