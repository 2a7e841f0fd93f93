#ifndef KRAKEN_ERRORS_HPP
#define KRAKEN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kraken {

// Base class for every error thrown by the simulator libraries.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Packed byte outside the valid base-3 range.
struct InvalidEncoding : Error {
    using Error::Error;
};

// Event coordinates outside the layer input dims.
struct OutOfBounds : Error {
    using Error::Error;
};

// Network exceeds an on-chip memory budget.
struct MemoryBudgetExceeded : Error {
    using Error::Error;
};

// Feature-map channel count does not match the layer.
struct ChannelMismatch : Error {
    using Error::Error;
};

// Layer shape the datapath cannot map (channel or kernel limits).
struct UnsupportedShape : Error {
    using Error::Error;
};

struct DegenerateWorkload : Error {
    using Error::Error;
};

struct DegenerateActivity : Error {
    using Error::Error;
};

struct DegenerateThroughput : Error {
    using Error::Error;
};

struct InvalidRange : Error {
    using Error::Error;
};

struct InvalidDims : Error {
    using Error::Error;
};

// Malformed input file; message carries line/field diagnostics.
struct ParseError : Error {
    using Error::Error;
};

// Well-formed file violating the schema or a declared invariant.
struct SchemaViolation : Error {
    using Error::Error;
};

// Event file not sorted by tick and auto-sorting not requested.
struct UnsortedStream : Error {
    using Error::Error;
};

// Event-driven run disagrees with the dense reference.
struct OracleMismatch : Error {
    using Error::Error;
};

} // namespace kraken

#endif
