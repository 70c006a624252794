#ifndef BARDO_CODEC_TOKEN_HPP
#define BARDO_CODEC_TOKEN_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "bardo/codec/note.hpp"
#include "bardo/error.hpp"

namespace bardo {

// Token id layout (stable):
//   0..127    VELOCITY(0..127)
//   128..183  DURATION(1..56)
//   184..311  PITCH(0..127)
//   312       TS
//   313       END
inline constexpr int kVelocityBase = 0;
inline constexpr int kDurationBase = 128;
inline constexpr int kPitchBase = kDurationBase + kMaxDuration;  // 184
inline constexpr int kTsId = kPitchBase + 128;                   // 312
inline constexpr int kEndId = kTsId + 1;                         // 313
inline constexpr int kVocabSize = kEndId + 1;                    // 314

enum class TokenKind { Velocity, Duration, Pitch, TimeStep, End };

class Token {
 public:
  using Id = std::uint16_t;

  constexpr Token() = default;
  /// Raw id; no range check. Search code also uses reduced test vocabularies.
  constexpr explicit Token(Id id) : id_(id) {}

  static Token velocity(int v) {
    check_range(v, 0, kMaxVelocity, "velocity");
    return Token(static_cast<Id>(kVelocityBase + v));
  }
  static Token duration(int d) {
    check_range(d, kMinDuration, kMaxDuration, "duration");
    return Token(static_cast<Id>(kDurationBase + d - kMinDuration));
  }
  static Token pitch(int p) {
    check_range(p, 0, kMaxPitch, "pitch");
    return Token(static_cast<Id>(kPitchBase + p));
  }
  static constexpr Token ts() { return Token(kTsId); }
  static constexpr Token end() { return Token(kEndId); }

  /// Checked conversion from a music-vocabulary id.
  static Token from_id(int id) {
    if (id < 0 || id >= kVocabSize)
      throw Error(ErrorCode::MalformedTokenSeq, "token id out of range: " + std::to_string(id));
    return Token(static_cast<Id>(id));
  }

  constexpr Id id() const { return id_; }

  // kind() and value() are only meaningful for music-vocabulary ids.
  constexpr TokenKind kind() const {
    if (id_ < kDurationBase) return TokenKind::Velocity;
    if (id_ < kPitchBase) return TokenKind::Duration;
    if (id_ < kTsId) return TokenKind::Pitch;
    if (id_ == kTsId) return TokenKind::TimeStep;
    return TokenKind::End;
  }

  constexpr int value() const {
    switch (kind()) {
      case TokenKind::Velocity: return id_ - kVelocityBase;
      case TokenKind::Duration: return id_ - kDurationBase + kMinDuration;
      case TokenKind::Pitch: return id_ - kPitchBase;
      default: return 0;
    }
  }

  std::string name() const {
    switch (kind()) {
      case TokenKind::Velocity: return "VELOCITY_" + std::to_string(value());
      case TokenKind::Duration: return "DURATION_" + std::to_string(value());
      case TokenKind::Pitch: return "PITCH_" + std::to_string(value());
      case TokenKind::TimeStep: return "TS";
      case TokenKind::End: return "END";
    }
    return "?";
  }

  friend constexpr bool operator==(Token, Token) = default;
  friend constexpr auto operator<=>(Token, Token) = default;

 private:
  static void check_range(int v, int lo, int hi, const char* what) {
    if (v < lo || v > hi)
      throw Error(ErrorCode::InvalidParams,
                  std::string(what) + " out of range: " + std::to_string(v));
  }

  Id id_ = 0;
};

using TokenSeq = std::vector<Token>;

/// Describes the id space a search runs over: its size and which ids mark a
/// timestep boundary and the end of a piece.
struct Vocabulary {
  int size = kVocabSize;
  Token ts = Token::ts();
  Token end = Token::end();

  static constexpr Vocabulary music() { return {}; }
};

/// The id <-> name table, one "id<TAB>name" line per token.
inline std::string token_table() {
  std::string out;
  for (int id = 0; id < kVocabSize; ++id) {
    out += std::to_string(id);
    out += '\t';
    out += Token::from_id(id).name();
    out += '\n';
  }
  return out;
}

/// FNV-1a 64 of the token table; stamped into model files.
inline std::uint64_t vocab_hash() {
  static const std::uint64_t hash = [] {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : token_table()) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }();
  return hash;
}

inline std::string vocab_hash_hex() {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(vocab_hash()));
  return buf;
}

}  // namespace bardo

#endif  // BARDO_CODEC_TOKEN_HPP
