#pragma once

#include <stdexcept>
#include <string>

namespace ascollab {

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConflictError : std::runtime_error {
    explicit ConflictError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotFoundError : std::runtime_error {
    explicit NotFoundError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BackendError : std::runtime_error {
    explicit BackendError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ascollab
