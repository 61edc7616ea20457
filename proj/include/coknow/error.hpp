#pragma once

#include <stdexcept>
#include <string>

namespace coknow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// shape or dimension mismatch between operands
struct DimensionError : Error {
    using Error::Error;
};

// caller handed us something unusable (empty sequence, bad label, ...)
struct InputError : Error {
    using Error::Error;
};

// violated run protocol: incomplete bank, bad config key, insufficient shots
struct ProtocolError : Error {
    using Error::Error;
};

// an external endpoint failed after retries
struct ServiceError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace coknow
