#ifndef BARDO_TESTS_SUPPORT_HPP
#define BARDO_TESTS_SUPPORT_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "bardo/bardo.hpp"

namespace bardo {

inline void PrintTo(const Note& n, std::ostream* os) {
  *os << "Note{p=" << n.pitch << " s=" << n.start << " d=" << n.duration << " v=" << n.velocity << "}";
}

inline void PrintTo(Token t, std::ostream* os) { *os << t.name(); }

}  // namespace bardo

namespace bardo::test {

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Random valid piece. Velocities start at 1 since a MIDI NOTE_ON with
/// velocity 0 is a release.
inline Piece random_piece(std::mt19937_64& rng, int rate = 0, int max_notes = 40, int max_start = 120) {
  Piece p;
  p.timestep_rate = rate > 0 ? rate : uniform_int(rng, 1, 16);
  const int n = uniform_int(rng, 0, max_notes);
  for (int i = 0; i < n; ++i)
    p.notes.push_back({uniform_int(rng, 0, kMaxPitch), uniform_int(rng, 0, max_start),
                       uniform_int(rng, kMinDuration, kMaxDuration), uniform_int(rng, 1, kMaxVelocity)});
  p.sort();
  return p;
}

// Raw MIDI building blocks.
inline smf::Event note_on(std::uint64_t tick, int channel, int pitch, int velocity) {
  return {tick, static_cast<std::uint8_t>(smf::kNoteOn | channel), 0,
          {static_cast<std::uint8_t>(pitch), static_cast<std::uint8_t>(velocity)}};
}

inline smf::Event note_off(std::uint64_t tick, int channel, int pitch) {
  return {tick, static_cast<std::uint8_t>(smf::kNoteOff | channel), 0, {static_cast<std::uint8_t>(pitch), 64}};
}

inline smf::Event program(std::uint64_t tick, int channel, int prog) {
  return {tick, static_cast<std::uint8_t>(smf::kProgramChange | channel), 0, {static_cast<std::uint8_t>(prog)}};
}

inline smf::Event tempo(std::uint64_t tick, std::uint32_t us_per_quarter) {
  return {tick, smf::kMeta, smf::kMetaTempo,
          {static_cast<std::uint8_t>(us_per_quarter >> 16), static_cast<std::uint8_t>(us_per_quarter >> 8),
           static_cast<std::uint8_t>(us_per_quarter)}};
}

inline std::vector<std::uint8_t> midi_file(std::vector<std::vector<smf::Event>> tracks, std::uint16_t division = 480,
                                           std::uint16_t format = 1) {
  smf::File f;
  f.format = format;
  f.division = division;
  for (auto& events : tracks) f.tracks.push_back({std::move(events), {}});
  return smf::write(f);
}

/// Directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path = std::filesystem::temp_directory_path() / ("bardo-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

// ---------------------------------------------------------------------------
// Synthetic emotion corpus
// ---------------------------------------------------------------------------

/// A piece whose pitch material follows valence (major scale up high versus
/// a low chromatic cluster) and whose density, loudness and note lengths
/// follow arousal.
inline Piece corner_piece(Emotion e, std::mt19937_64& rng, int timesteps = 32, int rate = kDefaultTimestepRate) {
  static constexpr int kMajor[] = {0, 2, 4, 7, 9};
  static constexpr int kDark[] = {1, 3, 6, 8, 10};
  Piece p;
  p.timestep_rate = rate;
  for (int s = 0; s < timesteps; ++s) {
    const int notes = e.arousal ? uniform_int(rng, 3, 4) : (s % 2 == 0 ? 1 : 0);
    for (int i = 0; i < notes; ++i) {
      const int pc = e.valence ? kMajor[uniform_int(rng, 0, 4)] : kDark[uniform_int(rng, 0, 4)];
      const int octave = e.valence ? uniform_int(rng, 5, 6) : uniform_int(rng, 3, 4);
      const int velocity = e.arousal ? uniform_int(rng, 90, 120) : uniform_int(rng, 30, 60);
      const int duration = e.arousal ? uniform_int(rng, 1, 2) : uniform_int(rng, 4, 8);
      p.notes.push_back({12 * octave + pc, s, duration, velocity});
    }
  }
  p.sort();
  return p;
}

inline std::vector<LabeledPiece> corner_corpus(int per_corner, std::uint64_t seed = 11) {
  std::mt19937_64 rng(seed);
  std::vector<LabeledPiece> out;
  for (int i = 0; i < per_corner; ++i)
    for (int v = 0; v < 2; ++v)
      for (int a = 0; a < 2; ++a)
        out.push_back({corner_piece({v, a}, rng), v, a,
                       "piece_" + std::to_string(v) + std::to_string(a) + "_" + std::to_string(i)});
  return out;
}

inline std::vector<StorySentence> story_fixture() {
  return {
      {"the festival was joyful and bright", StoryLabel::Happy},
      {"the quiet river flows slowly", StoryLabel::Calm},
      {"the battle rages and swords clash", StoryLabel::Agitated},
      {"something lurks in the dark corridor", StoryLabel::Suspenseful},
  };
}

/// Pieces whose arousal label is decided by density alone: at least four
/// notes per timestep versus at most one. Pitch, velocity and duration are
/// drawn from the same ranges for both classes.
inline std::vector<LabeledPiece> density_fixture(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LabeledPiece> out;
  for (int i = 0; i < count; ++i) {
    const int arousal = i % 2;
    LabeledPiece lp;
    lp.arousal = arousal;
    lp.valence = uniform_int(rng, 0, 1);
    const int steps = uniform_int(rng, 8, 24);
    for (int s = 0; s < steps; ++s) {
      const int n = arousal ? uniform_int(rng, 4, 6) : uniform_int(rng, s == 0 ? 1 : 0, 1);
      for (int k = 0; k < n; ++k)
        lp.piece.notes.push_back({uniform_int(rng, 36, 96), s, uniform_int(rng, 1, 8), uniform_int(rng, 20, 120)});
    }
    lp.piece.sort();
    out.push_back(std::move(lp));
  }
  return out;
}

struct ToyModels {
  std::shared_ptr<const ScorerBundle> bundle;
  std::shared_ptr<const StoryClassifier> classifier;
  std::shared_ptr<const SeedLibrary> library;
};

/// Small trained models over the synthetic corpus; built once per process.
inline const ToyModels& toy_models() {
  static const ToyModels models = [] {
    const auto corpus = corner_corpus(6);
    std::vector<TokenSeq> seqs;
    for (const auto& lp : corpus) seqs.push_back(encode(lp.piece));
    auto bundle = std::make_shared<ScorerBundle>();
    bundle->lm = std::make_shared<NGramModel>(train_lm(seqs, 3, 0.01));
    bundle->valence = std::make_shared<LogisticEmotionScorer>(train_emotion_scorer(corpus, EmotionDimension::Valence));
    bundle->arousal = std::make_shared<LogisticEmotionScorer>(train_emotion_scorer(corpus, EmotionDimension::Arousal));
    auto library = std::make_shared<SeedLibrary>();
    for (const auto& lp : corpus) library->add(lp);
    const auto story = story_fixture();
    auto classifier = std::make_shared<StoryClassifier>(train_story_classifier(story));
    return ToyModels{bundle, classifier, library};
  }();
  return models;
}

}  // namespace bardo::test

#endif  // BARDO_TESTS_SUPPORT_HPP
