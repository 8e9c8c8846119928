// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace strgcl {

enum class ErrorKind {
    shape,
    numeric_domain,
    insufficient_samples,
    contract,
    config,
    format,
    protocol,
    numeric,
    io,
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::shape: return "shape error";
    case ErrorKind::numeric_domain: return "numeric-domain error";
    case ErrorKind::insufficient_samples: return "insufficient-samples error";
    case ErrorKind::contract: return "contract error";
    case ErrorKind::config: return "config error";
    case ErrorKind::format: return "format error";
    case ErrorKind::protocol: return "protocol error";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::io: return "io error";
    }
    return "error";
}

/// Base exception for everything the library throws on a violated contract.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Malformed on-disk data; carries the byte offset at which validation failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(ErrorKind::format, what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const char* what) {
    if (!cond) throw Error(kind, what);
}

} // namespace strgcl
