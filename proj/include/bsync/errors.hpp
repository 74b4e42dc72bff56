#pragma once

#include <stdexcept>
#include <string>

namespace bsync {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller handed us arguments that violate a documented precondition.
struct InvalidArgument : Error {
    using Error::Error;
};

// A serialized container (trace, descriptor, sketch, codeword) is malformed.
struct FormatError : Error {
    using Error::Error;
};

// The error budget was exceeded or a verification step failed; recovery
// could not produce a trustworthy output.  Never silently swallowed.
struct RecoveryError : Error {
    using Error::Error;
};

}  // namespace bsync
