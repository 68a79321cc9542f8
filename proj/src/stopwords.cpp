#include "lexmatcher/stopwords.hpp"

#include "lexmatcher/corpus.hpp"
#include "lexmatcher/lemmatizer.hpp"
#include "lexmatcher/text.hpp"

namespace lexmatcher {

StopwordSet StopwordSet::load(const std::filesystem::path& path, const Lemmatizer& lemmatizer) {
    StopwordSet set;
    for (const std::string& raw : read_lines(path)) {
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        set.insert(lemmatizer.lemmatize(line));
    }
    return set;
}

} // namespace lexmatcher
