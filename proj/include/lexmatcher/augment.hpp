#pragma once

#include "lexmatcher/lexicon.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace lexmatcher {

/// Prompt template with the placeholders {SOURCE_SEGMENT}, {TARGET_SEGMENT},
/// {DEFINITION}, {SOURCE_LANG}, {TARGET_LANG}. Treated as data: load from a
/// file or take the built-in default.
class PromptTemplate {
public:
    static PromptTemplate load(const std::filesystem::path& path);
    static PromptTemplate builtin();
    static PromptTemplate from_text(std::string text); // validates placeholders

    const std::string& text() const { return text_; }

private:
    explicit PromptTemplate(std::string text) : text_(std::move(text)) {}
    std::string text_;
};

/// Human-readable language name for a BCP-47-ish tag ("en" -> "English");
/// unknown tags fall back to the tag itself.
std::string language_name(std::string_view lang_tag);

struct AugmentPrompt {
    std::string sense_id;
    std::string rendered_text;
};

/// One prompt per gap sense; senses without a definition render the
/// "(no definition available)" placeholder.
std::vector<AugmentPrompt> render_prompts(const std::vector<const SensePair*>& gaps,
                                          const PromptTemplate& tmpl, const PairResources& res);

struct EndpointConfig {
    std::string url;          // e.g. http://localhost:8080/v1/chat/completions
    std::string model;
    double temperature = 0.0;
    int timeout_seconds = 60;
    int max_attempts = 3;     // per prompt, exponential backoff between tries
    int backoff_initial_ms = 1000;
    int concurrency = 4;
    std::string api_key_env = "LEXMATCHER_API_KEY";
};

struct LlmResult {
    std::string sense_id;
    std::string response;
    bool ok = false;
    std::string error;
};

/// Chat-completions client over the conventional JSON wire format. Transient
/// failures (5xx, 408/429, timeouts) are retried with exponential backoff and
/// recorded per prompt; authentication failures abort the batch.
class ChatClient {
public:
    explicit ChatClient(EndpointConfig config);
    ~ChatClient();

    std::vector<LlmResult> complete_batch(const std::vector<AugmentPrompt>& prompts);

private:
    EndpointConfig config_;
    std::string scheme_host_;
    std::string path_;
    std::string api_key_;
};

struct GeneratedPair {
    std::string sense_id;
    std::string source_text;
    std::string target_text;
    std::string raw_response;
    bool valid = false;
    std::string reason; // empty when valid
};

/// Extracts the "Source:" / "Target:" labeled lines (case-insensitive) and
/// checks lemma-level containment of both segments against the gap sense with
/// the same sense id. Invalid pairs are kept with valid=false and a reason,
/// never dropped.
std::vector<GeneratedPair> parse_and_validate(const std::vector<LlmResult>& results,
                                              const std::vector<SensePair>& gap_senses,
                                              const PairResources& res);

/// True when the segment's lemma sequence occurs contiguously in the
/// lemmatized tokenization of `text`.
bool segment_in_text(const std::vector<std::string>& segment_lemmas, std::string_view text,
                     const LangResources& res);

// Offline round trip: prompts out, responses back in, results out.
void write_prompts_jsonl(const std::vector<AugmentPrompt>& prompts,
                         const std::filesystem::path& path);
std::vector<AugmentPrompt> read_prompts_jsonl(const std::filesystem::path& path);
void write_responses_jsonl(const std::vector<LlmResult>& results,
                           const std::filesystem::path& path);
std::vector<LlmResult> read_responses_jsonl(const std::filesystem::path& path);
void write_augmented_jsonl(const std::vector<GeneratedPair>& pairs,
                           const std::filesystem::path& path);
std::vector<GeneratedPair> read_augmented_jsonl(const std::filesystem::path& path);

} // namespace lexmatcher
