#include "dfp/types.hpp"
#include "dfp/error.hpp"

namespace dfp {

AccountId AccountId::from_index(std::uint64_t index) {
    AccountId id;
    for (int i = 0; i < 8; ++i)
        id.bytes[7 - i] = static_cast<std::uint8_t>(index >> (8 * i));
    // fixed tag in the tail so index 0 is not the all-zero id
    id.bytes[31] = 0xAC;
    return id;
}

std::string AccountId::to_hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ScheduleExhausted: return "schedule-exhausted";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Conflict: return "conflict";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Authorization: return "authorization";
    case ErrorKind::NotSelected: return "not-selected";
    case ErrorKind::TooLate: return "too-late";
    case ErrorKind::InconsistentRole: return "inconsistent-role";
    case ErrorKind::Bond: return "bond";
    case ErrorKind::State: return "state";
    case ErrorKind::NotDue: return "not-due";
    case ErrorKind::BundleConflict: return "bundle-conflict";
    case ErrorKind::Busy: return "busy";
    case ErrorKind::Funds: return "funds";
    case ErrorKind::Amount: return "amount";
    case ErrorKind::NotFound: return "not-found";
    }
    return "unknown";
}

} // namespace dfp
