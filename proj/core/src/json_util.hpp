#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace mpplab::detail {

using nlohmann::json;

// Field-level diagnostics for structured config errors.
class FieldError : public std::invalid_argument {
public:
    FieldError(const std::string& path, const std::string& what)
        : std::invalid_argument(path + ": " + what), path_(path)
    {
    }
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

inline const json& field(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object()) {
        throw FieldError(path, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw FieldError(path + "." + key, "missing required field");
    }
    return *it;
}

inline double number(const json& j, const std::string& path)
{
    if (!j.is_number()) {
        throw FieldError(path, "expected a number");
    }
    return j.get<double>();
}

inline std::string string(const json& j, const std::string& path)
{
    if (!j.is_string()) {
        throw FieldError(path, "expected a string");
    }
    return j.get<std::string>();
}

inline std::uint64_t unsigned_integer(const json& j, const std::string& path)
{
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw FieldError(path, "expected a nonnegative integer");
    }
    return j.get<std::uint64_t>();
}

// Converts a byte offset reported by the parser into "line L, column C".
inline std::string line_column(const std::string& text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline json parse_document(const std::string& text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw FieldError(what, "malformed JSON at " + line_column(text, e.byte));
    }
}

} // namespace mpplab::detail
