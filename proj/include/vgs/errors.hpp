#pragma once

#include <stdexcept>
#include <string>

namespace vgs {

/// Error categories. The numeric values double as CLI exit codes and as
/// C API status codes, so they are part of the public contract.
enum class ErrorCategory : int {
    config = 2,
    model = 3,
    exploration = 4,
    io = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::string message)
        : Error(ErrorCategory::config, std::move(message)) {}
};

class ModelError : public Error {
public:
    explicit ModelError(std::string message)
        : Error(ErrorCategory::model, std::move(message)) {}
};

class ExplorationError : public Error {
public:
    explicit ExplorationError(std::string message)
        : Error(ErrorCategory::exploration, std::move(message)) {}
};

class IoError : public Error {
public:
    explicit IoError(std::string message)
        : Error(ErrorCategory::io, std::move(message)) {}
};

/// Syntax or structural error in a text document, with a 1-based position.
class ParseError : public ConfigError {
public:
    ParseError(int line, int column, const std::string& what)
        : ConfigError("parse error at " + std::to_string(line) + ":" +
                      std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// Schema violation in a serialized document; carries a JSON-pointer style
/// path to the offending element.
class SchemaError : public IoError {
public:
    SchemaError(std::string path, const std::string& what)
        : IoError("schema error at " + path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Numerical integration produced a non-finite value.
class IntegrationError : public ModelError {
public:
    IntegrationError(std::string node, const std::string& what)
        : ModelError("integration diverged at node '" + node + "': " + what),
          node_(std::move(node)) {}

    const std::string& node() const noexcept { return node_; }

private:
    std::string node_;
};

} // namespace vgs
