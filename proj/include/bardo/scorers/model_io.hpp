#ifndef BARDO_SCORERS_MODEL_IO_HPP
#define BARDO_SCORERS_MODEL_IO_HPP

// Shared helpers for the text model formats. Every file starts with
//   bardo-model <kind> <version>
// followed by "key value..." header lines; doubles are written with 17
// significant digits so reloading is exact.

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bardo/codec/token.hpp"
#include "bardo/error.hpp"

namespace bardo::model_io {

inline constexpr int kFormatVersion = 1;

inline void write_header(std::ostream& out, const std::string& kind, bool music_vocab) {
  out << std::setprecision(17);
  out << "bardo-model " << kind << ' ' << kFormatVersion << '\n';
  if (music_vocab) out << "vocab-hash " << vocab_hash_hex() << '\n';
}

inline void expect_header(std::istream& in, const std::string& kind, bool music_vocab) {
  std::string magic, got_kind;
  int version = 0;
  if (!(in >> magic >> got_kind >> version) || magic != "bardo-model")
    throw Error(ErrorCode::ModelFormat, "not a bardo model file");
  if (got_kind != kind)
    throw Error(ErrorCode::ModelFormat, "expected a " + kind + " model, found " + got_kind);
  if (version != kFormatVersion)
    throw Error(ErrorCode::ModelFormat, "unsupported model format version " + std::to_string(version));
  if (music_vocab) {
    std::string key, hash;
    if (!(in >> key >> hash) || key != "vocab-hash")
      throw Error(ErrorCode::ModelFormat, "missing vocab-hash");
    if (hash != vocab_hash_hex())
      throw Error(ErrorCode::VocabularyMismatch,
                  "model vocabulary hash " + hash + " does not match codec table " + vocab_hash_hex());
  }
}

template <typename T>
T read_field(std::istream& in, const std::string& key) {
  std::string got;
  T value{};
  if (!(in >> got) || got != key) throw Error(ErrorCode::ModelFormat, "expected field '" + key + "'");
  if (!(in >> value)) throw Error(ErrorCode::ModelFormat, "bad value for field '" + key + "'");
  return value;
}

// operator>> rejects "inf"/"nan"; model files may legitimately hold -inf.
inline double read_double(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw Error(ErrorCode::ModelFormat, "expected a number");
  try {
    return std::stod(tok);
  } catch (const std::exception&) {
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::ModelFormat, "bad number '" + tok + "'");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace bardo::model_io

#endif  // BARDO_SCORERS_MODEL_IO_HPP
