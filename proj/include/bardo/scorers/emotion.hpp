#ifndef BARDO_SCORERS_EMOTION_HPP
#define BARDO_SCORERS_EMOTION_HPP

#include <string>
#include <string_view>

#include "bardo/error.hpp"

namespace bardo {

/// A corner of the valence/arousal square.
struct Emotion {
  int valence = 0;
  int arousal = 0;

  friend bool operator==(const Emotion&, const Emotion&) = default;
};

inline bool is_valid(Emotion e) {
  return (e.valence == 0 || e.valence == 1) && (e.arousal == 0 || e.arousal == 1);
}

enum class StoryLabel { Suspenseful, Agitated, Calm, Happy };

inline Emotion map_emotion(StoryLabel label) {
  switch (label) {
    case StoryLabel::Suspenseful: return {0, 0};
    case StoryLabel::Agitated: return {0, 1};
    case StoryLabel::Calm: return {1, 0};
    case StoryLabel::Happy: return {1, 1};
  }
  throw Error(ErrorCode::UnknownLabel, "unknown story label");
}

inline StoryLabel label_for(Emotion e) {
  if (!is_valid(e)) throw Error(ErrorCode::UnknownLabel, "emotion outside {0,1}^2");
  static constexpr StoryLabel kTable[2][2] = {{StoryLabel::Suspenseful, StoryLabel::Agitated},
                                              {StoryLabel::Calm, StoryLabel::Happy}};
  return kTable[e.valence][e.arousal];
}

inline std::string_view to_string(StoryLabel label) {
  switch (label) {
    case StoryLabel::Suspenseful: return "Suspenseful";
    case StoryLabel::Agitated: return "Agitated";
    case StoryLabel::Calm: return "Calm";
    case StoryLabel::Happy: return "Happy";
  }
  return "?";
}

inline StoryLabel parse_story_label(std::string_view text) {
  for (auto label : {StoryLabel::Suspenseful, StoryLabel::Agitated, StoryLabel::Calm,
                     StoryLabel::Happy})
    if (to_string(label) == text) return label;
  throw Error(ErrorCode::UnknownLabel, "unknown story label '" + std::string(text) + "'");
}

inline Emotion map_emotion(std::string_view label) { return map_emotion(parse_story_label(label)); }

}  // namespace bardo

#endif  // BARDO_SCORERS_EMOTION_HPP
