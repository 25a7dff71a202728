#pragma once

#include <stdexcept>
#include <string>

namespace hasse {

// Invalid argument or violated precondition.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Exact integer arithmetic left its representable range.
struct OverflowError : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// A local computation was requested at a place where the surface has no points.
struct EmptyLocalPoints : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input is not a member of the family a criterion is stated for.
struct FamilyMembershipError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Serialized document does not have the expected shape or version.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hasse
