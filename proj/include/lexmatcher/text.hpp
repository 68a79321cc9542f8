#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexmatcher {

// Minimal UTF-8 utilities. Inputs are assumed to be valid UTF-8; malformed
// bytes are passed through as single code units so nothing is ever lost.
namespace utf8 {

/// Decode one code point starting at `pos`; advances `pos` past it.
char32_t decode(std::string_view text, std::size_t& pos);

/// Append one code point to `out`.
void encode(char32_t cp, std::string& out);

/// Number of code points in `text`.
std::size_t length(std::string_view text);

/// Lowercase for ASCII, Latin-1 supplement, and Cyrillic; other ranges kept.
std::string lowercase(std::string_view text);

/// CJK unified ideograph (the ranges used for per-character tokenization).
bool is_han(char32_t cp);

/// ASCII punctuation plus common typographic and fullwidth CJK punctuation.
bool is_punct(char32_t cp);

} // namespace utf8

/// Trim ASCII whitespace from both ends.
std::string_view trim(std::string_view text);

/// Trim and collapse internal whitespace runs to a single space.
std::string collapse_whitespace(std::string_view text);

enum class TokenizerMode {
    Whitespace, // split on ASCII whitespace only
    CjkChar,    // additionally, every Han character is its own token
};

/// Splits sentences into the tokens all rule thresholds and matching use.
class Tokenizer {
public:
    explicit Tokenizer(TokenizerMode mode = TokenizerMode::Whitespace) : mode_(mode) {}

    /// CjkChar for zh/ja/ko tags (with or without region suffix), else Whitespace.
    static Tokenizer for_language(std::string_view lang_tag);

    std::vector<std::string> tokenize(std::string_view text) const;

    /// Inverse-ish of tokenize for display: space-separated, except no space
    /// on either side of a Han-final/Han-initial boundary in CjkChar mode.
    std::string join(const std::vector<std::string>& tokens, std::size_t begin, std::size_t count) const;
    std::string join(const std::vector<std::string>& tokens) const {
        return join(tokens, 0, tokens.size());
    }

    TokenizerMode mode() const { return mode_; }

private:
    TokenizerMode mode_;
};

} // namespace lexmatcher
