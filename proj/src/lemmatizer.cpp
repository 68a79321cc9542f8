#include "lexmatcher/lemmatizer.hpp"

#include "lexmatcher/corpus.hpp"
#include "lexmatcher/error.hpp"
#include "lexmatcher/text.hpp"

#include <array>

namespace lexmatcher {

Lemmatizer Lemmatizer::identity() { return Lemmatizer(false); }

Lemmatizer Lemmatizer::english() { return Lemmatizer(true); }

Lemmatizer Lemmatizer::for_language(std::string_view lang_tag) {
    std::string_view base = lang_tag.substr(0, lang_tag.find_first_of("-_"));
    return base == "en" ? english() : identity();
}

void Lemmatizer::load_exceptions(const std::filesystem::path& path) {
    std::size_t line_no = 0;
    for (const std::string& raw : read_lines(path)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw ParseError(path.string(), line_no, "expected 'surface<TAB>lemma'");
        }
        std::string_view surface = trim(line.substr(0, tab));
        std::string_view lemma = trim(line.substr(tab + 1));
        if (surface.empty() || lemma.empty()) {
            throw ParseError(path.string(), line_no, "empty surface or lemma");
        }
        add_exception(std::string(surface), std::string(lemma));
    }
}

namespace {
std::string strip_outer_punct(std::string_view token);
}

void Lemmatizer::add_exception(std::string surface, std::string lemma) {
    // Values pass through the same surface normalization so chained lookups
    // stay idempotent.
    exceptions_[utf8::lowercase(surface)] = utf8::lowercase(strip_outer_punct(lemma));
}

namespace {

std::string strip_outer_punct(std::string_view token) {
    // Leading pass.
    std::size_t begin = 0;
    while (begin < token.size()) {
        std::size_t next = begin;
        if (!utf8::is_punct(utf8::decode(token, next))) break;
        begin = next;
    }
    // Trailing pass: find the end of the last non-punct code point.
    std::size_t end = begin, pos = begin;
    while (pos < token.size()) {
        if (!utf8::is_punct(utf8::decode(token, pos))) end = pos;
    }
    if (end <= begin) return std::string(token); // all punctuation: keep as-is
    return std::string(token.substr(begin, end - begin));
}

bool ends_with(const std::string& w, std::string_view suffix) {
    return w.size() >= suffix.size() && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_ascii_consonant(char c) {
    return c >= 'a' && c <= 'z' && c != 'a' && c != 'e' && c != 'i' && c != 'o' && c != 'u';
}

// Undo consonant doubling after -ed/-ing removal: "stopp" -> "stop",
// but keep -ll/-ss/-zz ("fall", "miss", "buzz").
void undouble(std::string& stem) {
    std::size_t n = stem.size();
    if (n < 3) return;
    char c = stem[n - 1];
    if (c != stem[n - 2] || !is_ascii_consonant(c)) return;
    if (c == 'l' || c == 's' || c == 'z') return;
    stem.pop_back();
}

struct SuffixRule {
    std::string_view suffix;
    std::string_view replacement;
    std::size_t min_stem;
    bool undouble_stem;
};

// Ordered; the first rule whose suffix matches and whose guard passes wins.
constexpr std::array<SuffixRule, 11> kEnglishRules{{
    {"sses", "ss", 1, false},
    {"ies", "y", 2, false},
    {"ches", "ch", 1, false},
    {"shes", "sh", 1, false},
    {"xes", "x", 1, false},
    {"zes", "z", 2, false},
    {"oes", "o", 2, false},
    {"s", "", 3, false}, // guarded below: stem must not end in 's', 'u', 'i'
    {"ied", "y", 2, false},
    {"ed", "", 3, true},
    {"ing", "", 3, true},
}};

} // namespace

std::string Lemmatizer::step(const std::string& word) const {
    if (auto it = exceptions_.find(word); it != exceptions_.end()) return it->second;
    if (!english_rules_) return word;
    for (const SuffixRule& rule : kEnglishRules) {
        if (!ends_with(word, rule.suffix)) continue;
        std::size_t stem_len = word.size() - rule.suffix.size();
        if (stem_len < rule.min_stem) continue;
        if (rule.suffix == "s") {
            char last = word[stem_len - 1];
            if (last == 's' || last == 'u' || last == 'i') continue;
        }
        std::string stem = word.substr(0, stem_len);
        if (rule.undouble_stem) undouble(stem);
        stem += rule.replacement;
        return stem;
    }
    return word;
}

std::string Lemmatizer::lemmatize(std::string_view token) const {
    std::string current = utf8::lowercase(strip_outer_punct(token));
    if (current.empty()) return std::string(token);
    // Iterate to a fixed point; each rule application shortens the word, so
    // this terminates. The cap guards exception-table cycles.
    for (int i = 0; i < 16; ++i) {
        std::string next = step(current);
        if (next == current) break;
        current = std::move(next);
    }
    return current;
}

std::vector<std::string> Lemmatizer::lemmatize_all(const std::vector<std::string>& tokens) const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const std::string& token : tokens) out.push_back(lemmatize(token));
    return out;
}

std::vector<std::vector<std::string>> load_lemma_sidecar(const std::filesystem::path& path) {
    Tokenizer ws(TokenizerMode::Whitespace);
    std::vector<std::vector<std::string>> out;
    for (const std::string& line : read_lines(path)) out.push_back(ws.tokenize(line));
    return out;
}

} // namespace lexmatcher
