#pragma once

#include <stdexcept>
#include <string>

namespace cspec {

// Error categories carried by exceptions; the C API and the CLI map these
// onto stable numeric codes (invalid input -> 2, exhausted budget -> 3).
enum class ErrorKind {
    InvalidArgument,
    BudgetExhausted,
    SizeCap,
    NoConvergence,
    Io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_invalid(const std::string& what) {
    throw Error(ErrorKind::InvalidArgument, what);
}

[[noreturn]] inline void fail_budget(const std::string& what) {
    throw Error(ErrorKind::BudgetExhausted, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) fail_invalid(what);
}

}  // namespace cspec
