#ifndef BARDO_ERROR_HPP
#define BARDO_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace bardo {

enum class ErrorCode {
  MalformedMidi,
  MalformedTokenSeq,
  EmptyPiece,
  TooShort,
  EmptyCorpus,
  SingleClassData,
  MissingClass,
  UnknownLabel,
  EmptyCandidateSet,
  InvalidSeed,
  InvalidParams,
  SearchSpaceTooLarge,
  InvalidLibrary,
  ModelFormat,
  VocabularyMismatch,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedMidi: return "malformed_midi";
    case ErrorCode::MalformedTokenSeq: return "malformed_token_seq";
    case ErrorCode::EmptyPiece: return "empty_piece";
    case ErrorCode::TooShort: return "too_short";
    case ErrorCode::EmptyCorpus: return "empty_corpus";
    case ErrorCode::SingleClassData: return "single_class_data";
    case ErrorCode::MissingClass: return "missing_class";
    case ErrorCode::UnknownLabel: return "unknown_label";
    case ErrorCode::EmptyCandidateSet: return "empty_candidate_set";
    case ErrorCode::InvalidSeed: return "invalid_seed";
    case ErrorCode::InvalidParams: return "invalid_params";
    case ErrorCode::SearchSpaceTooLarge: return "search_space_too_large";
    case ErrorCode::InvalidLibrary: return "invalid_library";
    case ErrorCode::ModelFormat: return "model_format";
    case ErrorCode::VocabularyMismatch: return "vocabulary_mismatch";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bardo

#endif  // BARDO_ERROR_HPP
