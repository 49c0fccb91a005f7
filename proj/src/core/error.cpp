#include "argmine/error.hpp"

namespace argmine {

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kMalformedDocument: return "MalformedDocument";
    case ErrorKind::kEncodingError: return "EncodingError";
    case ErrorKind::kLawSectionNotFound: return "LawSectionNotFound";
    case ErrorKind::kOverlappingSpans: return "OverlappingSpans";
    case ErrorKind::kSpanOutOfBounds: return "SpanOutOfBounds";
    case ErrorKind::kInvalidSequence: return "InvalidSequence";
    case ErrorKind::kAlignmentMismatch: return "AlignmentMismatch";
    case ErrorKind::kTooFewAnnotators: return "TooFewAnnotators";
    case ErrorKind::kEmptyContinuum: return "EmptyContinuum";
    case ErrorKind::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorKind::kConfigInvalid: return "ConfigInvalid";
    case ErrorKind::kEmptySplit: return "EmptySplit";
    case ErrorKind::kVocabMissing: return "VocabMissing";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kNoArguments: return "NoArguments";
    case ErrorKind::kDegenerateClass: return "DegenerateClass";
  }
  return "Unknown";
}

}  // namespace argmine
