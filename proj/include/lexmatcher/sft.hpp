#pragma once

#include "lexmatcher/augment.hpp"
#include "lexmatcher/corpus.hpp"
#include "lexmatcher/matcher.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lexmatcher {

struct Constraint {
    std::string source_surface; // segment as it appeared in the input sentence
    std::string target_segment; // dictionary target, verbatim
};

struct InstructionSample {
    std::string instruction;
    std::string input;
    std::string output;
    std::vector<Constraint> constraints; // 0..max_constraints_per_sample
    std::string direction;               // e.g. "en-zh"
    // Position of the originating pair within the subset, when it has one;
    // lets callers pair up general/constrained samples. Not serialized.
    std::size_t subset_position = static_cast<std::size_t>(-1);
};

struct BuildConfig {
    // {SRC}/{TGT} expand to language names. The list is cycled per direction.
    std::vector<std::string> general_templates = {
        "Translate the following sentence from {SRC} to {TGT}.",
    };
    std::string constrained_instruction =
        "Translate the following sentence from {SRC} to {TGT} using the given reference "
        "translations.";
    std::string constraint_connector = "means";
    int max_constrained_per_direction = 10000;
    int max_constraints_per_sample = 3;
    std::uint64_t rng_seed = 0;
    bool constrained_replaces_general = false;

    void validate() const;
};

/// One general sample per retrieved pair and per valid generated pair;
/// instructions rotate through the template list (seeded starting offset).
std::vector<InstructionSample> build_general(const Corpus& subset,
                                             const std::vector<GeneratedPair>& generated,
                                             const BuildConfig& cfg);

/// Seeded uniform sample of up to max_constrained_per_direction eligible
/// pairs; each carries 1..3 matched segment pairs rendered as
/// `"s" means "t".` clauses prepended to the constrained instruction.
std::vector<InstructionSample> build_constrained(const Corpus& subset,
                                                 const std::vector<LoadedMatchRecord>& records,
                                                 const BuildConfig& cfg);

/// Shuffles by rng_seed and writes JSONL rows with exactly the fields
/// `instruction`, `input`, `output`. Byte-identical across reruns.
void emit_dataset(std::vector<InstructionSample> samples, std::uint64_t rng_seed,
                  const std::filesystem::path& out_path);

/// Lemma-level containment of every constraint against the sample's own
/// input/output; used by validation and the acceptance suite.
bool sample_constraints_ok(const InstructionSample& sample, const PairResources& res);

} // namespace lexmatcher
