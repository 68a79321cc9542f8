#include "lexmatcher/toml.hpp"

#include "lexmatcher/error.hpp"
#include "lexmatcher/text.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

namespace lexmatcher {

namespace {

// Removes a trailing comment, respecting quoted strings.
std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string parse_basic_string(std::string_view text, const std::string& source, std::size_t line_no) {
    // text includes the surrounding quotes
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
        char c = text[i];
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        ++i;
        if (i + 1 >= text.size()) throw ParseError(source, line_no, "dangling escape");
        switch (text[i]) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default:
            throw ParseError(source, line_no, std::string("unsupported escape \\") + text[i]);
        }
    }
    return out;
}

TomlValue parse_scalar(std::string_view text, const std::string& source, std::size_t line_no) {
    text = trim(text);
    if (text.empty()) throw ParseError(source, line_no, "empty value");
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') {
            throw ParseError(source, line_no, "unterminated string");
        }
        return TomlValue(parse_basic_string(text, source, line_no));
    }
    if (text == "true") return TomlValue(true);
    if (text == "false") return TomlValue(false);
    bool looks_float = text.find_first_of(".eE") != std::string_view::npos;
    if (!looks_float) {
        std::int64_t i = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
        if (ec == std::errc() && p == text.data() + text.size()) return TomlValue(i);
    }
    double d = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), d);
    if (ec == std::errc() && p == text.data() + text.size()) return TomlValue(d);
    throw ParseError(source, line_no, "cannot parse value '" + std::string(text) + "'");
}

std::vector<std::string_view> split_array_items(std::string_view body, const std::string& source,
                                                std::size_t line_no) {
    std::vector<std::string_view> items;
    bool in_string = false;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= body.size(); ++i) {
        bool at_end = i == body.size();
        char c = at_end ? ',' : body[i];
        if (!at_end && c == '"' && (i == 0 || body[i - 1] != '\\')) in_string = !in_string;
        if (c == ',' && !in_string) {
            std::string_view item = trim(body.substr(start, i - start));
            if (!item.empty()) items.push_back(item);
            start = i + 1;
        }
    }
    if (in_string) throw ParseError(source, line_no, "unterminated string in array");
    return items;
}

} // namespace

TomlTable TomlTable::parse(std::string_view text, const std::string& source_name) {
    TomlTable table;
    table.source_ = source_name;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        ++line_no;
        std::string_view line = trim(strip_comment(text.substr(pos, eol - pos)));
        pos = eol + 1;
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(source_name, line_no, "malformed section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section.empty() || section.find('[') != std::string::npos) {
                throw ParseError(source_name, line_no, "malformed section header");
            }
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(source_name, line_no, "expected 'key = value'");
        }
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError(source_name, line_no, "empty key");
        std::string_view value = trim(line.substr(eq + 1));
        std::string dotted = section.empty() ? key : section + "." + key;
        if (table.values_.count(dotted)) {
            throw ParseError(source_name, line_no, "duplicate key '" + dotted + "'");
        }
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']') {
                throw ParseError(source_name, line_no, "arrays must close on the same line");
            }
            TomlValue::Array array;
            for (std::string_view item :
                 split_array_items(value.substr(1, value.size() - 2), source_name, line_no)) {
                array.push_back(parse_scalar(item, source_name, line_no));
            }
            table.values_.emplace(std::move(dotted), TomlValue(std::move(array)));
        } else {
            table.values_.emplace(std::move(dotted), parse_scalar(value, source_name, line_no));
        }
        if (eol == text.size()) break;
    }
    return table;
}

TomlTable TomlTable::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(text, path.string());
}

const TomlValue* TomlTable::find(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

bool TomlTable::has(const std::string& dotted_key) const { return find(dotted_key) != nullptr; }

std::string TomlTable::get_string(const std::string& key, const std::string& fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(source_ + ": '" + key + "' must be a string");
    return std::get<std::string>(v->storage());
}

std::int64_t TomlTable::get_int(const std::string& key, std::int64_t fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (!v->is_int()) throw ConfigError(source_ + ": '" + key + "' must be an integer");
    return std::get<std::int64_t>(v->storage());
}

double TomlTable::get_double(const std::string& key, double fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (v->is_int()) return static_cast<double>(std::get<std::int64_t>(v->storage()));
    if (!v->is_float()) throw ConfigError(source_ + ": '" + key + "' must be a number");
    return std::get<double>(v->storage());
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (!v->is_bool()) throw ConfigError(source_ + ": '" + key + "' must be a boolean");
    return std::get<bool>(v->storage());
}

std::vector<std::string> TomlTable::get_string_array(const std::string& key,
                                                     std::vector<std::string> fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError(source_ + ": '" + key + "' must be an array");
    std::vector<std::string> out;
    for (const TomlValue& item : std::get<TomlValue::Array>(v->storage())) {
        if (!item.is_string()) {
            throw ConfigError(source_ + ": '" + key + "' must contain only strings");
        }
        out.push_back(std::get<std::string>(item.storage()));
    }
    return out;
}

std::vector<std::int64_t> TomlTable::get_int_array(const std::string& key,
                                                   std::vector<std::int64_t> fallback) const {
    const TomlValue* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError(source_ + ": '" + key + "' must be an array");
    std::vector<std::int64_t> out;
    for (const TomlValue& item : std::get<TomlValue::Array>(v->storage())) {
        if (!item.is_int()) {
            throw ConfigError(source_ + ": '" + key + "' must contain only integers");
        }
        out.push_back(std::get<std::int64_t>(item.storage()));
    }
    return out;
}

std::vector<std::string> TomlTable::keys() const {
    std::vector<std::string> out;
    out.reserve(values_.size());
    for (const auto& [key, value] : values_) out.push_back(key);
    return out;
}

namespace {

void append_canonical(std::string& out, const TomlValue& value) {
    if (value.is_string()) {
        out += '"';
        out += std::get<std::string>(value.storage());
        out += '"';
    } else if (value.is_int()) {
        out += std::to_string(std::get<std::int64_t>(value.storage()));
    } else if (value.is_float()) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(value.storage()));
        out += buf;
    } else if (value.is_bool()) {
        out += std::get<bool>(value.storage()) ? "true" : "false";
    } else {
        out += '[';
        const auto& array = std::get<TomlValue::Array>(value.storage());
        for (std::size_t i = 0; i < array.size(); ++i) {
            if (i) out += ',';
            append_canonical(out, array[i]);
        }
        out += ']';
    }
}

} // namespace

std::string TomlTable::canonical() const {
    std::string out;
    for (const auto& [key, value] : values_) {
        out += key;
        out += '=';
        append_canonical(out, value);
        out += '\n';
    }
    return out;
}

} // namespace lexmatcher
