#ifndef BARDO_BARDO_HPP
#define BARDO_BARDO_HPP

// Everything except the HTTP binding (bardo/service/http.hpp).

#include "bardo/codec/midi.hpp"
#include "bardo/codec/note.hpp"
#include "bardo/codec/smf.hpp"
#include "bardo/codec/token.hpp"
#include "bardo/codec/tokenizer.hpp"
#include "bardo/composer/seed_library.hpp"
#include "bardo/composer/session.hpp"
#include "bardo/corpus/corpus.hpp"
#include "bardo/corpus/digest.hpp"
#include "bardo/error.hpp"
#include "bardo/scorers/bundle.hpp"
#include "bardo/scorers/emotion.hpp"
#include "bardo/scorers/emotion_scorer.hpp"
#include "bardo/scorers/language_model.hpp"
#include "bardo/scorers/story_classifier.hpp"
#include "bardo/search/sbbs.hpp"
#include "bardo/service/session_service.hpp"

#endif  // BARDO_BARDO_HPP
