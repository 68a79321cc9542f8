#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lexmatcher {

// Flat TOML subset: [section] headers, `key = value` lines, # comments.
// Values: basic strings, integers, floats, booleans, single-line arrays of
// scalars. That covers every config this toolkit reads; nested tables and
// multi-line syntax are rejected with a clear error.
class TomlValue {
public:
    using Array = std::vector<TomlValue>;
    using Storage = std::variant<std::string, std::int64_t, double, bool, Array>;

    TomlValue() : storage_(std::string()) {}
    explicit TomlValue(Storage storage) : storage_(std::move(storage)) {}

    bool is_string() const { return std::holds_alternative<std::string>(storage_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(storage_); }
    bool is_float() const { return std::holds_alternative<double>(storage_); }
    bool is_bool() const { return std::holds_alternative<bool>(storage_); }
    bool is_array() const { return std::holds_alternative<Array>(storage_); }

    const Storage& storage() const { return storage_; }

private:
    Storage storage_;
};

class TomlTable {
public:
    static TomlTable parse(std::string_view text, const std::string& source_name);
    static TomlTable parse_file(const std::filesystem::path& path);

    bool has(const std::string& dotted_key) const;

    std::string get_string(const std::string& key, const std::string& fallback = {}) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback = 0) const;
    double get_double(const std::string& key, double fallback = 0.0) const;
    bool get_bool(const std::string& key, bool fallback = false) const;
    std::vector<std::string> get_string_array(const std::string& key,
                                              std::vector<std::string> fallback = {}) const;
    std::vector<std::int64_t> get_int_array(const std::string& key,
                                            std::vector<std::int64_t> fallback = {}) const;

    /// All dotted keys present, sorted (also the canonical digest form).
    std::vector<std::string> keys() const;

    /// Sorted `key = value` lines; used for config digests.
    std::string canonical() const;

private:
    const TomlValue* find(const std::string& key) const;
    std::map<std::string, TomlValue> values_; // dotted "section.key"
    std::string source_;
};

} // namespace lexmatcher
