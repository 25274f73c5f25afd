#pragma once

#include <stdexcept>
#include <string>

namespace spotdiff {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unknown category / property set / object id.
struct LookupError : Error {
    explicit LookupError(const std::string& msg) : Error(msg) {}
};

// Malformed data file.
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Invalid run configuration; carries the offending field name.
struct ConfigError : Error {
    ConfigError(const std::string& field, const std::string& msg)
        : Error("config field '" + field + "': " + msg), field(field) {}
    std::string field;
};

// Answer kind does not match the question subtype, or refer without a count.
struct ProtocolError : Error {
    explicit ProtocolError(const std::string& msg) : Error(msg) {}
};

// Evidence rules produced an impossible state (e.g. two refuted objects).
struct TrackerInconsistency : Error {
    explicit TrackerInconsistency(const std::string& msg) : Error(msg) {}
};

// Scene or pair construction exhausted its retry budget.
struct GenerationError : Error {
    explicit GenerationError(const std::string& msg) : Error(msg) {}
};

// Template or phrase catalog cannot realize an action.
struct RenderError : Error {
    explicit RenderError(const std::string& msg) : Error(msg) {}
};

}  // namespace spotdiff
