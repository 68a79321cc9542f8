#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>

namespace lexmatcher {

class Lemmatizer;

/// Lemma-keyed stopword set; membership is always tested on lemmas.
class StopwordSet {
public:
    StopwordSet() = default;

    /// One token per line, '#' comments allowed; entries are lemma-normalized.
    static StopwordSet load(const std::filesystem::path& path, const Lemmatizer& lemmatizer);

    void insert(std::string lemma) { words_.insert(std::move(lemma)); }
    bool contains(std::string_view lemma) const {
        return words_.find(std::string(lemma)) != words_.end();
    }
    bool empty() const { return words_.empty(); }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

} // namespace lexmatcher
