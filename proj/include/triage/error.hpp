#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace triage {

enum class ErrorKind {
    not_registrable,
    empty_node,
    shape,
    unstratifiable,
    degenerate,
    io,
    empty_class,
    incompatible_model,
    not_found,
    conflict,
    validation,
    startup,
    invalid_argument,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace triage
