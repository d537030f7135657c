/**
 * @file errors.hpp
 * @brief Exception types and small formatting helpers shared across modules.
 */
#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

#include "gstpinn/taylor.hpp"

namespace gstpinn {

/// printf-style formatting into a std::string (GCC 11 has no std::format).
template <class... Args>
std::string strf(const char* fmt, Args... args) {
    const int n = std::snprintf(nullptr, 0, fmt, args...);
    std::string s(n > 0 ? static_cast<size_t>(n) : 0, '\0');
    if (n > 0) std::snprintf(s.data(), s.size() + 1, fmt, args...);
    return s;
}

/// Round-trippable decimal rendering of a double.
inline std::string g17(double v) { return strf("%.17g", v); }

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad user-facing configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

/// Mismatched sizes/shapes in library calls.
struct DimensionError : Error {
    using Error::Error;
};

/// A DerivativeJet was asked for a multi-index it does not carry.
struct MissingJetEntry : Error {
    MultiIndex index;
    explicit MissingJetEntry(MultiIndex mi)
        : Error(strf("derivative jet has no entry for multi-index (%d,%d)", mi.dt, mi.dx)),
          index(mi) {}
};

/// Non-finite value met during loss evaluation; names term and point.
struct NanError : Error {
    using Error::Error;
};

/// File/serialization problems.
struct IoError : Error {
    using Error::Error;
};

/// Reference solver failed to meet its refinement tolerance.
struct RefinementError : Error {
    using Error::Error;
};

}  // namespace gstpinn
