#include "lexmatcher/text.hpp"

#include <cctype>

namespace lexmatcher {

namespace utf8 {

char32_t decode(std::string_view text, std::size_t& pos) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    unsigned char b0 = byte(pos);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    auto cont = [&](std::size_t i) {
        return i < text.size() && (byte(i) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(pos + 1)) {
        char32_t cp = (char32_t(b0 & 0x1F) << 6) | (byte(pos + 1) & 0x3F);
        pos += 2;
        return cp;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(pos + 1) && cont(pos + 2)) {
        char32_t cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(byte(pos + 1) & 0x3F) << 6) |
                      (byte(pos + 2) & 0x3F);
        pos += 3;
        return cp;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(pos + 1) && cont(pos + 2) && cont(pos + 3)) {
        char32_t cp = (char32_t(b0 & 0x07) << 18) | (char32_t(byte(pos + 1) & 0x3F) << 12) |
                      (char32_t(byte(pos + 2) & 0x3F) << 6) | (byte(pos + 3) & 0x3F);
        pos += 4;
        return cp;
    }
    // Malformed byte: surface it as-is.
    ++pos;
    return b0;
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::size_t length(std::string_view text) {
    std::size_t n = 0, pos = 0;
    while (pos < text.size()) {
        decode(text, pos);
        ++n;
    }
    return n;
}

namespace {

char32_t lower_cp(char32_t cp) {
    if (cp >= U'A' && cp <= U'Z') return cp + 32;
    // Latin-1 supplement: À..Þ except ×
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    // Cyrillic А..Я and Ё
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
    if (cp == 0x401) return 0x451;
    return cp;
}

} // namespace

std::string lowercase(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        encode(lower_cp(decode(text, pos)), out);
    }
    return out;
}

bool is_han(char32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) ||  // unified ideographs
           (cp >= 0x3400 && cp <= 0x4DBF) ||  // extension A
           (cp >= 0xF900 && cp <= 0xFAFF);    // compatibility ideographs
}

bool is_punct(char32_t cp) {
    if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
    switch (cp) {
    case 0x2018: case 0x2019: case 0x201C: case 0x201D: // ‘ ’ “ ”
    case 0x2013: case 0x2014: case 0x2026:               // – — …
    case 0x3001: case 0x3002:                            // 、 。
    case 0x300A: case 0x300B: case 0x3008: case 0x3009:  // 《 》 〈 〉
    case 0x3010: case 0x3011:                            // 【 】
    case 0xFF01: case 0xFF08: case 0xFF09: case 0xFF0C:  // ！ （ ） ，
    case 0xFF1A: case 0xFF1B: case 0xFF1F:               // ： ； ？
        return true;
    default:
        return false;
    }
}

} // namespace utf8

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

} // namespace

std::string_view trim(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    return text.substr(b, e - b);
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_run = false;
    for (char c : trim(text)) {
        if (is_space(c)) {
            in_run = true;
        } else {
            if (in_run && !out.empty()) out.push_back(' ');
            in_run = false;
            out.push_back(c);
        }
    }
    return out;
}

Tokenizer Tokenizer::for_language(std::string_view lang_tag) {
    std::string_view base = lang_tag.substr(0, lang_tag.find_first_of("-_"));
    if (base == "zh" || base == "ja" || base == "ko") return Tokenizer(TokenizerMode::CjkChar);
    return Tokenizer(TokenizerMode::Whitespace);
}

std::vector<std::string> Tokenizer::tokenize(std::string_view text) const {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    std::size_t pos = 0;
    while (pos < text.size()) {
        char c = text[pos];
        if (static_cast<unsigned char>(c) < 0x80) {
            if (is_space(c)) {
                flush();
            } else {
                current.push_back(c);
            }
            ++pos;
            continue;
        }
        std::size_t start = pos;
        char32_t cp = utf8::decode(text, pos);
        if (mode_ == TokenizerMode::CjkChar && utf8::is_han(cp)) {
            flush();
            tokens.emplace_back(text.substr(start, pos - start));
        } else {
            current.append(text.substr(start, pos - start));
        }
    }
    flush();
    return tokens;
}

namespace {

bool han_boundary(const std::string& token, bool leading) {
    if (token.empty()) return false;
    std::size_t pos = 0;
    char32_t cp = 0;
    if (leading) {
        cp = utf8::decode(token, pos);
    } else {
        // Decode the last code point by rescanning; tokens are short.
        while (pos < token.size()) cp = utf8::decode(token, pos);
    }
    return utf8::is_han(cp);
}

} // namespace

std::string Tokenizer::join(const std::vector<std::string>& tokens, std::size_t begin,
                            std::size_t count) const {
    std::string out;
    for (std::size_t i = begin; i < begin + count && i < tokens.size(); ++i) {
        if (i > begin) {
            bool glue = mode_ == TokenizerMode::CjkChar &&
                        (han_boundary(tokens[i - 1], false) || han_boundary(tokens[i], true));
            if (!glue) out.push_back(' ');
        }
        out += tokens[i];
    }
    return out;
}

} // namespace lexmatcher
