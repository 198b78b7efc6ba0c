#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dfp {

enum class ErrorKind {
    ScheduleExhausted,
    Configuration,
    Conflict,
    Domain,
    Authorization,
    NotSelected,
    TooLate,
    InconsistentRole,
    Bond,
    State,
    NotDue,
    BundleConflict,
    Busy,
    Funds,
    Amount,
    NotFound,
};

std::string_view to_string(ErrorKind kind);

/// Rejection of an operation by the protocol, ledger or models.
/// State is left untouched when this is thrown.
class ProtocolError : public std::runtime_error {
public:
    ProtocolError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace dfp
