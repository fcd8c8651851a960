#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace zerotree {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Decrypt failed: wrong key, tampered bytes, or mismatched associated data.
// The three causes are indistinguishable on purpose.
struct AuthenticationFailure : Error {
    AuthenticationFailure() : Error("authentication failure") {}
};

struct CodecError : Error {
    using Error::Error;
};

struct CorruptStream : Error {
    using Error::Error;
};

struct InvalidParams : Error {
    using Error::Error;
};

struct NonceExhausted : Error {
    NonceExhausted() : Error("per-key encryption budget exhausted") {}
};

struct TransportError : Error {
    using Error::Error;
};

struct BindFailure : Error {
    using Error::Error;
};

struct CorruptLog : Error {
    using Error::Error;
};

// Optimistic commit lost the race on `oid`; re-read and retry the transaction.
struct ConflictError : Error {
    explicit ConflictError(std::uint64_t conflicting)
        : Error("commit conflict on oid " + std::to_string(conflicting)), oid(conflicting) {}
    std::uint64_t oid;
};

struct NotFoundError : Error {
    using Error::Error;
};

struct MissingIndex : Error {
    using Error::Error;
};

struct DuplicateDocument : Error {
    using Error::Error;
};

struct EmptyCorpus : Error {
    EmptyCorpus() : Error("corpus has no indexed documents") {}
};

struct OutOfGrant : Error {
    OutOfGrant() : Error("probe outside the granted key range") {}
};

struct DomainError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    size_t line;
};

}  // namespace zerotree
