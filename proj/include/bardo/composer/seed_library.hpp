#ifndef BARDO_COMPOSER_SEED_LIBRARY_HPP
#define BARDO_COMPOSER_SEED_LIBRARY_HPP

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "bardo/codec/tokenizer.hpp"
#include "bardo/corpus/corpus.hpp"
#include "bardo/scorers/emotion.hpp"

namespace bardo {

/// Opening material per emotion corner: the first four timesteps of
/// human-composed pieces, used to (re)start generation.
class SeedLibrary {
 public:
  static constexpr std::size_t kSeedTimesteps = 4;

  /// Stores the first four timesteps of `tokens` (padded with TS when the
  /// source is shorter).
  void add(Emotion e, std::span<const Token> tokens) {
    if (!is_valid(e)) throw Error(ErrorCode::InvalidLibrary, "seed emotion outside {0,1}^2");
    corners_[index(e)].push_back(truncate_to_timesteps(tokens, kSeedTimesteps));
  }

  void add(const LabeledPiece& lp) { add({lp.valence, lp.arousal}, encode(lp.piece)); }

  const std::vector<TokenSeq>& entries(Emotion e) const { return corners_.at(index(e)); }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& c : corners_) n += c.size();
    return n;
  }

  /// Every corner needs an entry; every entry exactly four TS and no END.
  void validate() const {
    for (int v = 0; v < 2; ++v)
      for (int a = 0; a < 2; ++a) {
        const auto& list = corners_[index({v, a})];
        if (list.empty())
          throw Error(ErrorCode::InvalidLibrary, "seed library has no entry for (" + std::to_string(v) + "," +
                                                     std::to_string(a) + ")");
        for (const auto& seq : list) {
          if (count_ts(seq) != kSeedTimesteps)
            throw Error(ErrorCode::InvalidLibrary, "seed entry does not span exactly 4 timesteps");
          for (Token t : seq)
            if (t == Token::end() || t.id() >= kVocabSize)
              throw Error(ErrorCode::InvalidLibrary, "seed entry contains END or a foreign id");
        }
      }
  }

  // Text form: a "bardo-seed-library 1" line, then "<v> <a> <id> <id> ..."
  // per entry.
  std::string to_text() const {
    std::ostringstream out;
    out << "bardo-seed-library 1\n";
    for (int v = 0; v < 2; ++v)
      for (int a = 0; a < 2; ++a)
        for (const auto& seq : corners_[index({v, a})]) {
          out << v << ' ' << a;
          for (Token t : seq) out << ' ' << t.id();
          out << '\n';
        }
    return out.str();
  }

  static SeedLibrary from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("bardo-seed-library 1", 0) != 0)
      throw Error(ErrorCode::InvalidLibrary, "not a seed library file");
    SeedLibrary lib;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::istringstream row(line);
      Emotion e;
      if (!(row >> e.valence >> e.arousal)) throw Error(ErrorCode::InvalidLibrary, "bad seed library line");
      TokenSeq seq;
      int id = 0;
      while (row >> id) seq.push_back(Token::from_id(id));
      if (!is_valid(e)) throw Error(ErrorCode::InvalidLibrary, "seed emotion outside {0,1}^2");
      lib.corners_[index(e)].push_back(std::move(seq));
    }
    return lib;
  }

 private:
  static std::size_t index(Emotion e) { return static_cast<std::size_t>(e.valence * 2 + e.arousal); }

  std::array<std::vector<TokenSeq>, 4> corners_;
};

}  // namespace bardo

#endif  // BARDO_COMPOSER_SEED_LIBRARY_HPP
