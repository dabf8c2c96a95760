#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gsdmm {

enum class Errc {
    DuplicateDocId,
    AllDocumentsEmpty,
    IoError,
    MalformedRecord,
    InactiveCluster,
    NonFiniteScore,
    KMaxExceedsCorpus,
    KRealExceedsActive,
    KRealOutOfRange,
    EmptyCluster,
    ZeroNorm,
    LengthMismatch,
    NonPositiveArgument,
    InstanceTooLarge,
    TooManyClusters,
    InvalidConfig,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Carries the 1-based line of the offending record.
class MalformedRecordError : public Error {
public:
    MalformedRecordError(std::size_t line, const std::string& detail)
        : Error(Errc::MalformedRecord,
                "malformed record at line " + std::to_string(line) + ": " + detail),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace gsdmm
