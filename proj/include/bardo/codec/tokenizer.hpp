#ifndef BARDO_CODEC_TOKENIZER_HPP
#define BARDO_CODEC_TOKENIZER_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>

#include "bardo/codec/note.hpp"
#include "bardo/codec/token.hpp"
#include "bardo/log.hpp"

namespace bardo {

/// Note triples (VELOCITY, DURATION, PITCH) grouped by start timestep, each
/// group closed by TS, for timesteps 0 through the last onset; END last.
inline TokenSeq encode(const Piece& piece) {
  validate(piece);
  TokenSeq out;
  if (piece.notes.empty()) {
    out.push_back(Token::end());
    return out;
  }
  const std::int64_t last = piece.notes.back().start;
  out.reserve(piece.notes.size() * 3 + static_cast<std::size_t>(last) + 2);
  auto it = piece.notes.begin();
  for (std::int64_t step = 0; step <= last; ++step) {
    for (; it != piece.notes.end() && it->start == step; ++it) {
      out.push_back(Token::velocity(it->velocity));
      out.push_back(Token::duration(it->duration));
      out.push_back(Token::pitch(it->pitch));
    }
    out.push_back(Token::ts());
  }
  out.push_back(Token::end());
  return out;
}

enum class DecodeMode {
  /// Grammar violations throw MalformedTokenSeq.
  Strict,
  /// Grammar violations are logged and repaired: a pending partial triple is
  /// abandoned, then the offending token is reinterpreted (VELOCITY opens a
  /// new triple, TS advances time, END stops) or dropped.
  Lenient,
};

/// Inverse of encode. A trailing incomplete triple (at the end of the input
/// or right before END) is dropped with a warning.
inline Piece decode(std::span<const Token> tokens, int timestep_rate = kDefaultTimestepRate,
                    DecodeMode mode = DecodeMode::Strict) {
  if (timestep_rate < 1) throw Error(ErrorCode::InvalidParams, "timestep_rate must be >= 1");
  Piece piece;
  piece.timestep_rate = timestep_rate;
  std::int64_t step = 0;
  int pending = 0;  // tokens of the current triple seen so far
  int velocity = 0;
  int duration = 0;
  bool ended = false;

  auto violation = [&](std::size_t index, const std::string& why) {
    std::string msg = "token " + std::to_string(index) + ": " + why;
    if (mode == DecodeMode::Strict) throw Error(ErrorCode::MalformedTokenSeq, msg);
    logger()->debug("repairing token sequence, {}", msg);
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token tok = tokens[i];
    if (tok.id() >= kVocabSize) {
      violation(i, "id outside the music vocabulary");
      continue;
    }
    if (ended) {
      violation(i, "token after END");
      break;
    }
    const TokenKind kind = tok.kind();
    const bool expected = (pending == 0 && (kind == TokenKind::Velocity ||
                                            kind == TokenKind::TimeStep ||
                                            kind == TokenKind::End)) ||
                          (pending == 1 && kind == TokenKind::Duration) ||
                          (pending == 2 && kind == TokenKind::Pitch);
    if (!expected) {
      if (pending > 0 && kind == TokenKind::End) {
        logger()->warn("dropping incomplete note triple before END");
      } else {
        violation(i, tok.name() + " out of place");
      }
      pending = 0;
      if (kind == TokenKind::Duration || kind == TokenKind::Pitch) continue;
    }
    switch (kind) {
      case TokenKind::Velocity:
        velocity = tok.value();
        pending = 1;
        break;
      case TokenKind::Duration:
        duration = tok.value();
        pending = 2;
        break;
      case TokenKind::Pitch:
        piece.notes.push_back({tok.value(), step, duration, velocity});
        pending = 0;
        break;
      case TokenKind::TimeStep:
        ++step;
        break;
      case TokenKind::End:
        ended = true;
        break;
    }
  }
  if (pending > 0) logger()->warn("dropping trailing incomplete note triple");
  piece.sort();
  return piece;
}

inline std::size_t count_ts(std::span<const Token> tokens, Token ts = Token::ts()) {
  return static_cast<std::size_t>(std::count(tokens.begin(), tokens.end(), ts));
}

/// Seconds spanned by a token sequence: its TS count over the timestep rate.
inline double duration_seconds(std::span<const Token> tokens, int timestep_rate,
                               Token ts = Token::ts()) {
  if (timestep_rate < 1) throw Error(ErrorCode::InvalidParams, "timestep_rate must be >= 1");
  return static_cast<double>(count_ts(tokens, ts)) / timestep_rate;
}

/// Keeps tokens up to and including the n-th TS, padding with TS when the
/// sequence has fewer. END and anything after it are removed.
inline TokenSeq truncate_to_timesteps(std::span<const Token> tokens, std::size_t n) {
  TokenSeq out;
  std::size_t seen = 0;
  for (Token t : tokens) {
    if (seen == n || t == Token::end()) break;
    out.push_back(t);
    if (t == Token::ts()) ++seen;
  }
  for (; seen < n; ++seen) out.push_back(Token::ts());
  return out;
}

}  // namespace bardo

#endif  // BARDO_CODEC_TOKENIZER_HPP
