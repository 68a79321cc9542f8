#pragma once

#include <stdexcept>
#include <string>

namespace lexmatcher {

/// Base error for all failures reported by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File cannot be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Two line-aligned resources disagree on length.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// A line in an input file does not parse.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), file_(file), line_(line) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Bad configuration value, unknown key, or missing template placeholder.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace lexmatcher
