#pragma once

#include <stdexcept>
#include <string>

namespace chaintransport {

enum class ErrorKind {
    invalid_argument,  // bad parameters or malformed input
    size_limit,        // dense storage cap exceeded
    numerical,         // decomposition or consistency check failed
    unconverged,       // time integration hit its horizon
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::size_limit: return "size_limit";
        case ErrorKind::numerical: return "numerical";
        case ErrorKind::unconverged: return "unconverged";
    }
    return "unknown";
}

[[noreturn]] inline void throw_invalid(const std::string& message) {
    throw Error(ErrorKind::invalid_argument, message);
}

} // namespace chaintransport
