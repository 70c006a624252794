#ifndef BARDO_COMPOSER_SESSION_HPP
#define BARDO_COMPOSER_SESSION_HPP

#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bardo/codec/midi.hpp"
#include "bardo/codec/tokenizer.hpp"
#include "bardo/composer/seed_library.hpp"
#include "bardo/scorers/bundle.hpp"
#include "bardo/scorers/story_classifier.hpp"
#include "bardo/search/sbbs.hpp"

namespace bardo {

/// Excerpt length in seconds when a sentence carries no duration.
inline constexpr double kDefaultSentenceSeconds = 5.18;

struct SessionConfig {
  int beam_size = kDefaultBeamSize;
  int expansion_k = kDefaultExpansionK;
  int timestep_rate = kDefaultTimestepRate;
  double sentence_seconds = kDefaultSentenceSeconds;
  int max_new_tokens = kDefaultMaxNewTokens;
  std::uint64_t rng_seed = 0;
};

enum class SentenceEvent {
  Initial,   // first sentence: the piece starts from a library seed
  Reseed,    // emotion changed: generation restarts from a fresh seed
  Continue,  // same emotion: the current material is extended
};

inline std::string_view to_string(SentenceEvent e) {
  switch (e) {
    case SentenceEvent::Initial: return "initial";
    case SentenceEvent::Reseed: return "reseed";
    case SentenceEvent::Continue: return "continue";
  }
  return "?";
}

struct SentenceRecord {
  std::string text;
  Emotion emotion;
  double confidence_valence = 1.0;
  double confidence_arousal = 1.0;
  bool overridden = false;
  SentenceEvent event = SentenceEvent::Initial;
  std::size_t segment = 0;  // which composed segment the excerpt extends
  std::size_t begin = 0;    // excerpt token span within that segment
  std::size_t end = 0;
  double target_seconds = 0.0;
  double excerpt_seconds = 0.0;
  bool is_short = false;
};

struct Excerpt {
  Emotion emotion;
  double confidence_valence = 1.0;
  double confidence_arousal = 1.0;
  bool reseeded = false;
  bool is_short = false;
  TokenSeq tokens;
  double seconds = 0.0;
  std::vector<std::uint8_t> midi;
};

/// One storytelling session: classifies each sentence, reseeds from the
/// library on emotion transitions, and extends the piece with a searched
/// excerpt of the sentence's duration.
///
/// On a transition the current material is archived as a finished segment
/// and a new segment starts from a random library seed, so the search only
/// sees the new seed while the exported piece keeps everything.
class ComposerSession {
 public:
  ComposerSession(std::shared_ptr<const ScorerBundle> bundle, std::shared_ptr<const StoryClassifier> classifier,
                  std::shared_ptr<const SeedLibrary> library, SessionConfig config)
      : bundle_(std::move(bundle)),
        classifier_(std::move(classifier)),
        library_(std::move(library)),
        config_(config),
        rng_(config.rng_seed) {
    if (!bundle_ || !classifier_ || !library_)
      throw Error(ErrorCode::InvalidParams, "session needs a bundle, a classifier and a seed library");
    bundle_->validate();
    library_->validate();
    if (config_.timestep_rate < 1 || !(config_.sentence_seconds > 0.0))
      throw Error(ErrorCode::InvalidParams, "session timestep rate and sentence seconds must be positive");
  }

  /// Handles one sentence. `duration` overrides the configured sentence
  /// length; `emotion` bypasses the classifier.
  Excerpt process_sentence(std::string_view text, std::optional<double> duration = std::nullopt,
                           std::optional<Emotion> emotion = std::nullopt) {
    SentenceRecord rec;
    rec.text = std::string(text);
    if (emotion) {
      if (!is_valid(*emotion)) throw Error(ErrorCode::InvalidParams, "emotion override outside {0,1}^2");
      rec.emotion = *emotion;
      rec.overridden = true;
    } else {
      const StoryPrediction p = classifier_->classify(text);
      rec.emotion = p.emotion;
      rec.confidence_valence = p.confidence_valence;
      rec.confidence_arousal = p.confidence_arousal;
    }
    rec.target_seconds = duration.value_or(config_.sentence_seconds);
    if (!(rec.target_seconds > 0.0) || !std::isfinite(rec.target_seconds))
      throw Error(ErrorCode::InvalidParams, "sentence duration must be > 0");

    if (!current_) {
      rec.event = SentenceEvent::Initial;
    } else if (*current_ != rec.emotion) {
      rec.event = SentenceEvent::Reseed;
    } else {
      rec.event = SentenceEvent::Continue;
    }
    if (rec.event != SentenceEvent::Continue) {
      if (current_) archived_.push_back(std::move(composed_));
      const auto& options = library_->entries(rec.emotion);
      const auto pick = static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(options.size()));
      composed_ = options[std::min(pick, options.size() - 1)];
      current_ = rec.emotion;
    }

    SearchParams params;
    params.beam_size = config_.beam_size;
    params.expansion_k = config_.expansion_k;
    params.target = rec.emotion;
    params.target_seconds = rec.target_seconds;
    params.timestep_rate = config_.timestep_rate;
    params.max_new_tokens = config_.max_new_tokens;
    params.rng_seed = rng_();
    const SearchResult result = sbbs(*bundle_, composed_, params);

    Excerpt out;
    out.emotion = rec.emotion;
    out.confidence_valence = rec.confidence_valence;
    out.confidence_arousal = rec.confidence_arousal;
    out.reseeded = rec.event == SentenceEvent::Reseed;
    out.is_short = result.is_short;
    out.tokens.assign(result.suffix().begin(), result.suffix().end());
    out.seconds = duration_seconds(out.tokens, config_.timestep_rate);
    out.midi = write_midi(decode(out.tokens, config_.timestep_rate, DecodeMode::Lenient));

    rec.segment = archived_.size();
    rec.begin = composed_.size();
    for (Token t : out.tokens)
      if (t != Token::end()) composed_.push_back(t);
    rec.end = composed_.size();
    rec.excerpt_seconds = out.seconds;
    rec.is_short = out.is_short;
    log_.push_back(std::move(rec));
    return out;
  }

  /// Every segment in order, END-terminated. Stray tokens in generated
  /// material are repaired rather than rejected.
  TokenSeq piece_tokens() const {
    TokenSeq all;
    for (const auto& seg : archived_) all.insert(all.end(), seg.begin(), seg.end());
    all.insert(all.end(), composed_.begin(), composed_.end());
    all.push_back(Token::end());
    return all;
  }

  std::vector<std::uint8_t> export_piece() const {
    return write_midi(decode(piece_tokens(), config_.timestep_rate, DecodeMode::Lenient));
  }

  /// Tab-separated sidecar log, one line per sentence after a header.
  std::string log_text() const {
    std::ostringstream out;
    out << "index\tevent\tvalence\tarousal\tconfidence_v\tconfidence_a\toverride\tsegment\tbegin\tend"
           "\ttarget_seconds\texcerpt_seconds\tshort\ttext\n";
    char buf[64];
    for (std::size_t i = 0; i < log_.size(); ++i) {
      const auto& r = log_[i];
      out << i << '\t' << to_string(r.event) << '\t' << r.emotion.valence << '\t' << r.emotion.arousal;
      std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f", r.confidence_valence, r.confidence_arousal);
      out << buf << '\t' << (r.overridden ? 1 : 0) << '\t' << r.segment << '\t' << r.begin << '\t' << r.end;
      std::snprintf(buf, sizeof buf, "\t%.4f\t%.4f", r.target_seconds, r.excerpt_seconds);
      out << buf << '\t' << (r.is_short ? 1 : 0) << '\t' << sanitize_field(r.text) << '\n';
    }
    return out.str();
  }

  const TokenSeq& composed() const { return composed_; }
  const std::vector<TokenSeq>& archived() const { return archived_; }
  const std::vector<SentenceRecord>& log() const { return log_; }
  std::optional<Emotion> current_emotion() const { return current_; }
  const SessionConfig& config() const { return config_; }

  double total_seconds() const {
    return duration_seconds(piece_tokens(), config_.timestep_rate);
  }

 private:
  static std::string sanitize_field(const std::string& text) {
    std::string out = text;
    for (char& c : out)
      if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return out;
  }

  std::shared_ptr<const ScorerBundle> bundle_;
  std::shared_ptr<const StoryClassifier> classifier_;
  std::shared_ptr<const SeedLibrary> library_;
  SessionConfig config_;
  SearchRng rng_;
  TokenSeq composed_;
  std::vector<TokenSeq> archived_;
  std::optional<Emotion> current_;
  std::vector<SentenceRecord> log_;
};

struct TranscriptLine {
  std::string text;
  std::optional<double> seconds;
};

/// One sentence per line with an optional "\t<seconds>" suffix. Blank lines
/// are skipped.
inline std::vector<TranscriptLine> parse_transcript(const std::string& text) {
  std::vector<TranscriptLine> lines;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    TranscriptLine t;
    const auto tab = line.rfind('\t');
    if (tab != std::string::npos) {
      const std::string tail = line.substr(tab + 1);
      std::size_t used = 0;
      double seconds = 0.0;
      try {
        seconds = std::stod(tail, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tail.size() || !(seconds > 0.0))
        throw Error(ErrorCode::InvalidParams, "transcript line " + std::to_string(line_no) +
                                                  ": duration must be a positive number");
      t.seconds = seconds;
      line.resize(tab);
    }
    t.text = line;
    lines.push_back(std::move(t));
  }
  return lines;
}

}  // namespace bardo

#endif  // BARDO_COMPOSER_SESSION_HPP
