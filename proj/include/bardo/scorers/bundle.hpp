#ifndef BARDO_SCORERS_BUNDLE_HPP
#define BARDO_SCORERS_BUNDLE_HPP

#include <memory>

#include "bardo/codec/token.hpp"
#include "bardo/scorers/emotion_scorer.hpp"
#include "bardo/scorers/language_model.hpp"

namespace bardo {

/// The models a search consumes. Immutable once built, so one bundle can be
/// shared by any number of concurrent searches.
struct ScorerBundle {
  std::shared_ptr<const LanguageModel> lm;
  std::shared_ptr<const EmotionScorer> valence;
  std::shared_ptr<const EmotionScorer> arousal;
  Vocabulary vocab = Vocabulary::music();

  void validate() const {
    if (!lm || !valence || !arousal)
      throw Error(ErrorCode::InvalidParams, "scorer bundle is missing a model");
    if (lm->vocab_size() != vocab.size)
      throw Error(ErrorCode::VocabularyMismatch, "language model vocabulary size " +
                                                     std::to_string(lm->vocab_size()) + " != " +
                                                     std::to_string(vocab.size));
    if (vocab.ts.id() >= vocab.size || vocab.end.id() >= vocab.size || vocab.ts == vocab.end)
      throw Error(ErrorCode::InvalidParams, "TS and END must be distinct ids inside the vocabulary");
  }
};

}  // namespace bardo

#endif  // BARDO_SCORERS_BUNDLE_HPP
