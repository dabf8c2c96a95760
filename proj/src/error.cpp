#include "gsdmm/error.hpp"

namespace gsdmm {

const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::DuplicateDocId: return "DuplicateDocId";
        case Errc::AllDocumentsEmpty: return "AllDocumentsEmpty";
        case Errc::IoError: return "IoError";
        case Errc::MalformedRecord: return "MalformedRecord";
        case Errc::InactiveCluster: return "InactiveCluster";
        case Errc::NonFiniteScore: return "NonFiniteScore";
        case Errc::KMaxExceedsCorpus: return "KMaxExceedsCorpus";
        case Errc::KRealExceedsActive: return "KRealExceedsActive";
        case Errc::KRealOutOfRange: return "KRealOutOfRange";
        case Errc::EmptyCluster: return "EmptyCluster";
        case Errc::ZeroNorm: return "ZeroNorm";
        case Errc::LengthMismatch: return "LengthMismatch";
        case Errc::NonPositiveArgument: return "NonPositiveArgument";
        case Errc::InstanceTooLarge: return "InstanceTooLarge";
        case Errc::TooManyClusters: return "TooManyClusters";
        case Errc::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

}  // namespace gsdmm
