#pragma once

#include <stdexcept>
#include <string>

namespace logeff {

enum class ErrorKind {
    MalformedRecord,
    MissingMandatoryField,
    BadTimestamp,
    IoFailure,
    CorpusEmpty,
    TemplateParse,
    DuplicateTarget,
    UnknownTransform,
    TemplateMismatch,
    SignatureParse,
    DuplicateId,
    BadRegex,
    ZeroDenominator,
    PreservedExceedsTotal,
    InvalidSpec,
};

const char* to_string(ErrorKind kind);

/// Input/data error. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

/// Broken internal invariant. The CLI maps these to exit code 3.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& message)
        : std::logic_error("internal invariant violated: " + message) {}
};

inline void internal_check(bool condition, const std::string& message) {
    if (!condition) {
        throw InternalError(message);
    }
}

}  // namespace logeff
