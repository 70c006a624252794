#ifndef BARDO_CORPUS_CORPUS_HPP
#define BARDO_CORPUS_CORPUS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bardo/codec/midi.hpp"
#include "bardo/codec/tokenizer.hpp"
#include "bardo/corpus/digest.hpp"
#include "bardo/csv.hpp"

namespace bardo {

struct LabeledPiece {
  Piece piece;
  int valence = 0;
  int arousal = 0;
  std::string source_id;

  friend bool operator==(const LabeledPiece&, const LabeledPiece&) = default;
};

struct SourceFile {
  std::string path;
  std::vector<std::uint8_t> bytes;
};

struct ManifestEntry {
  std::string digest;
  std::size_t bytes = 0;
  std::string path;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  std::size_t piece_count = 0;
  std::size_t token_count = 0;

  friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

// ---------------------------------------------------------------------------
// Piano track extraction
// ---------------------------------------------------------------------------

inline constexpr int kDrumChannel = 9;

/// Keeps the piano-family tracks of a file: tracks with notes, no notes on
/// the drum channel, and every program change in 0..7 (no program change
/// means the GM default, program 0). Note-free tracks (tempo maps, titles)
/// ride along with the kept tracks. A file whose tracks all qualify comes
/// back byte-identical; std::nullopt when no track qualifies.
inline std::optional<std::vector<std::uint8_t>> extract_piano_tracks(
    std::span<const std::uint8_t> bytes) {
  const smf::File file = smf::read(bytes);
  std::vector<std::size_t> keep;
  std::size_t piano_tracks = 0;
  for (std::size_t i = 0; i < file.tracks.size(); ++i) {
    bool has_notes = false;
    bool piano = true;
    for (const auto& ev : file.tracks[i].events) {
      if (!ev.is_channel()) continue;
      if (ev.kind() == smf::kProgramChange && ev.data[0] > 7) piano = false;
      if (ev.kind() == smf::kNoteOn && ev.data[1] > 0) {
        has_notes = true;
        if (ev.channel() == kDrumChannel) piano = false;
      }
    }
    if (!has_notes) {
      keep.push_back(i);
    } else if (piano) {
      keep.push_back(i);
      ++piano_tracks;
    }
  }
  if (piano_tracks == 0) return std::nullopt;
  if (keep.size() == file.tracks.size())
    return std::vector<std::uint8_t>(bytes.begin(), bytes.end());
  return smf::write_raw_tracks(file, keep);
}

// ---------------------------------------------------------------------------
// Deduplication and manifests
// ---------------------------------------------------------------------------

/// One entry per distinct MD5; the first occurrence of a digest wins. When a
/// timestep rate is given, the token count over the surviving files is
/// filled in (unparsable files contribute zero tokens).
inline CorpusManifest dedup(std::span<const SourceFile> files,
                            std::optional<int> timestep_rate = std::nullopt) {
  CorpusManifest manifest;
  std::unordered_set<std::string> seen;
  for (const auto& f : files) {
    std::string digest = md5_hex(f.bytes);
    if (!seen.insert(digest).second) continue;
    manifest.entries.push_back({std::move(digest), f.bytes.size(), f.path});
    if (timestep_rate) {
      try {
        manifest.token_count += encode(parse_midi(f.bytes, *timestep_rate)).size();
      } catch (const Error& e) {
        logger()->warn("{}: not counted in token stats ({})", f.path, e.what());
      }
    }
  }
  manifest.piece_count = manifest.entries.size();
  return manifest;
}

/// "<digest> <bytes> <path>" per line, preceded by a '#' stats comment.
inline std::string to_text(const CorpusManifest& m) {
  std::ostringstream out;
  out << "# pieces " << m.piece_count << " tokens " << m.token_count << '\n';
  for (const auto& e : m.entries) out << e.digest << ' ' << e.bytes << ' ' << e.path << '\n';
  return out.str();
}

inline CorpusManifest manifest_from_text(const std::string& text) {
  CorpusManifest m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream stats(line.substr(1));
      std::string key;
      std::size_t value = 0;
      while (stats >> key >> value) {
        if (key == "pieces") m.piece_count = value;
        if (key == "tokens") m.token_count = value;
      }
      continue;
    }
    const auto a = line.find(' ');
    const auto b = a == std::string::npos ? a : line.find(' ', a + 1);
    if (b == std::string::npos)
      throw Error(ErrorCode::InvalidParams, "malformed manifest line: " + line);
    m.entries.push_back({line.substr(0, a), std::stoull(line.substr(a + 1, b - a - 1)),
                         line.substr(b + 1)});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Augmentation
// ---------------------------------------------------------------------------

inline constexpr int kMinShift = -5;
inline constexpr int kMaxShift = 6;
inline constexpr std::array<double, 3> kTempoFactors = {0.9, 1.0, 1.1};
inline constexpr std::array<double, 3> kVelocityFactors = {0.9, 1.0, 1.1};
inline constexpr std::size_t kAugmentCount =
    (kMaxShift - kMinShift + 1) * kTempoFactors.size() * kVelocityFactors.size();  // 108

/// Position of a (shift, tempo index, velocity index) cell in augment()'s
/// output; shift is outermost.
inline constexpr std::size_t augment_cell(int shift, std::size_t tempo, std::size_t velocity) {
  return (static_cast<std::size_t>(shift - kMinShift) * kTempoFactors.size() + tempo) *
             kVelocityFactors.size() +
         velocity;
}

inline constexpr std::size_t kIdentityCell = augment_cell(0, 1, 1);

inline int transpose_pitch(int pitch, int shift) {
  int p = pitch + shift;
  while (p > kMaxPitch) p -= 12;
  while (p < 0) p += 12;
  return p;
}

/// A tempo factor f > 1 plays faster: onsets and releases move to t / f
/// seconds and are re-quantized.
inline Piece change_tempo(const Piece& piece, double factor) {
  Piece out = piece;
  const double rate = piece.timestep_rate;
  for (auto& n : out.notes) {
    const double on = static_cast<double>(n.start) / rate / factor;
    const double off = static_cast<double>(n.start + n.duration) / rate / factor;
    n.start = quantize(on, piece.timestep_rate);
    n.duration = clamp_duration(quantize(off, piece.timestep_rate) - n.start);
  }
  out.sort();
  return out;
}

inline Piece scale_velocity(const Piece& piece, double factor) {
  Piece out = piece;
  for (auto& n : out.notes)
    n.velocity = static_cast<int>(std::clamp<long>(std::lround(n.velocity * factor), 0, kMaxVelocity));
  out.sort();
  return out;
}

inline Piece transpose(const Piece& piece, int shift) {
  Piece out = piece;
  for (auto& n : out.notes) n.pitch = transpose_pitch(n.pitch, shift);
  out.sort();
  return out;
}

/// The 12 x 3 x 3 grid: semitone shifts -5..+6, tempo x{0.9, 1.0, 1.1},
/// velocity x{0.9, 1.0, 1.1}. Cell kIdentityCell is the input itself.
inline std::vector<Piece> augment(const Piece& piece) {
  validate(piece);
  if (piece.empty()) throw Error(ErrorCode::EmptyPiece, "cannot augment an empty piece");
  std::vector<Piece> out;
  out.reserve(kAugmentCount);
  for (int shift = kMinShift; shift <= kMaxShift; ++shift) {
    const Piece moved = transpose(piece, shift);
    for (double tempo : kTempoFactors) {
      const Piece timed = tempo == 1.0 ? moved : change_tempo(moved, tempo);
      for (double velocity : kVelocityFactors)
        out.push_back(velocity == 1.0 ? timed : scale_velocity(timed, velocity));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slicing
// ---------------------------------------------------------------------------

inline constexpr std::array<int, 4> kSliceParts = {2, 4, 8, 16};

/// [begin, end) timestep bounds of `parts` equal slices of [0, total); the
/// last slice absorbs the remainder.
inline std::vector<std::pair<std::int64_t, std::int64_t>> slice_bounds(std::int64_t total,
                                                                       int parts) {
  if (parts < 1) throw Error(ErrorCode::InvalidParams, "parts must be >= 1");
  if (total < parts)
    throw Error(ErrorCode::TooShort, "piece spans " + std::to_string(total) +
                                         " timesteps, fewer than " + std::to_string(parts) +
                                         " parts");
  const std::int64_t len = total / parts;
  std::vector<std::pair<std::int64_t, std::int64_t>> bounds;
  for (int i = 0; i < parts; ++i)
    bounds.emplace_back(i * len, i + 1 == parts ? total : (i + 1) * len);
  return bounds;
}

/// Cuts a piece's span (up to its last release) into `parts` slices. Each
/// note lands in the slice holding its onset, rebased to the slice start and
/// truncated at the slice end. Labels are inherited.
inline std::vector<LabeledPiece> slice_piece(const LabeledPiece& labeled, int parts) {
  if (parts != 2 && parts != 4 && parts != 8 && parts != 16)
    throw Error(ErrorCode::InvalidParams, "parts must be one of 2, 4, 8, 16");
  const auto bounds = slice_bounds(labeled.piece.end_timestep(), parts);
  std::vector<LabeledPiece> out;
  out.reserve(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto [begin, end] = bounds[i];
    LabeledPiece slice;
    slice.valence = labeled.valence;
    slice.arousal = labeled.arousal;
    slice.source_id = labeled.source_id + "#" + std::to_string(parts) + "." + std::to_string(i);
    slice.piece.timestep_rate = labeled.piece.timestep_rate;
    for (const auto& n : labeled.piece.notes) {
      if (n.start < begin || n.start >= end) continue;
      Note cut = n;
      cut.start = n.start - begin;
      cut.duration = clamp_duration(std::min<std::int64_t>(n.duration, end - n.start));
      slice.piece.notes.push_back(cut);
    }
    slice.piece.sort();
    out.push_back(std::move(slice));
  }
  return out;
}

/// All slicings at 2, 4, 8 and 16 parts (30 pieces).
inline std::vector<LabeledPiece> slice_all(const LabeledPiece& labeled) {
  std::vector<LabeledPiece> out;
  for (int parts : kSliceParts) {
    auto s = slice_piece(labeled, parts);
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Label files
// ---------------------------------------------------------------------------

struct LabelRow {
  std::string path;
  int valence = 0;
  int arousal = 0;
};

inline int parse_binary_label(const std::string& field) {
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw Error(ErrorCode::UnknownLabel, "label must be 0 or 1, got '" + field + "'");
}

/// CSV with header "path,valence,arousal".
inline std::vector<LabelRow> read_labels(const std::string& text) {
  std::vector<LabelRow> rows;
  for (auto& f : csv::read(text, {"path", "valence", "arousal"}))
    rows.push_back({f[0], parse_binary_label(f[1]), parse_binary_label(f[2])});
  return rows;
}

inline std::string write_labels(std::span<const LabelRow> rows) {
  std::string out = "path,valence,arousal\n";
  for (const auto& r : rows)
    out += csv::quote(r.path) + "," + std::to_string(r.valence) + "," + std::to_string(r.arousal) + "\n";
  return out;
}

}  // namespace bardo

#endif  // BARDO_CORPUS_CORPUS_HPP
