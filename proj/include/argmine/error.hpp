#pragma once

#include <stdexcept>
#include <string>

namespace argmine {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kParse,
  kEmptyCorpus,
  kMalformedDocument,
  kEncodingError,
  kLawSectionNotFound,
  kOverlappingSpans,
  kSpanOutOfBounds,
  kInvalidSequence,
  kAlignmentMismatch,
  kTooFewAnnotators,
  kEmptyContinuum,
  kEmptyTrainingSet,
  kConfigInvalid,
  kEmptySplit,
  kVocabMissing,
  kLengthMismatch,
  kNoArguments,
  kDegenerateClass,
};

const char* error_kind_name(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (and the C
// API) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace argmine
