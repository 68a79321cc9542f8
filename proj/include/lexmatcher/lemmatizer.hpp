#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexmatcher {

/// Table-plus-suffix-rule lemmatizer. Total and deterministic: strips outer
/// punctuation, lowercases (where the script has case), then applies the
/// exception table and suffix rules to a fixed point, so the result is
/// always idempotent. Falls back to the surface form when nothing applies.
class Lemmatizer {
public:
    /// No rules, no table: punctuation strip + lowercase only.
    static Lemmatizer identity();

    /// Built-in English plural/-ed/-ing suffix rules.
    static Lemmatizer english();

    /// "en" (any region) gets the English rules, everything else identity.
    static Lemmatizer for_language(std::string_view lang_tag);

    /// Exception file: `surface \t lemma` per line, '#' comments allowed.
    void load_exceptions(const std::filesystem::path& path);
    void add_exception(std::string surface, std::string lemma);

    std::string lemmatize(std::string_view token) const;
    std::vector<std::string> lemmatize_all(const std::vector<std::string>& tokens) const;

    std::size_t exception_count() const { return exceptions_.size(); }

private:
    explicit Lemmatizer(bool english_rules) : english_rules_(english_rules) {}

    std::string step(const std::string& word) const;

    std::unordered_map<std::string, std::string> exceptions_;
    bool english_rules_ = false;
};

/// Loads per-corpus-line lemma sequences ("lemma sidecar"): one
/// whitespace-joined sequence per line, aligned to the corpus file.
std::vector<std::vector<std::string>> load_lemma_sidecar(const std::filesystem::path& path);

} // namespace lexmatcher
