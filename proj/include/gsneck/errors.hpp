#pragma once

#include <stdexcept>
#include <string>

namespace gsneck {

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error("shape error: " + msg) {}
};

struct SizeError : std::runtime_error {
    explicit SizeError(const std::string& msg) : std::runtime_error("size error: " + msg) {}
};

struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& msg) : std::runtime_error("geometry error: " + msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error("numeric error: " + msg) {}
};

struct LookupError : std::runtime_error {
    explicit LookupError(const std::string& msg) : std::runtime_error("lookup error: " + msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error("format error: " + msg) {}
};

} // namespace gsneck
