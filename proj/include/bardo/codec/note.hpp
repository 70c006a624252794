#ifndef BARDO_CODEC_NOTE_HPP
#define BARDO_CODEC_NOTE_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "bardo/error.hpp"

namespace bardo {

inline constexpr int kMaxPitch = 127;
inline constexpr int kMaxVelocity = 127;
inline constexpr int kMinDuration = 1;
inline constexpr int kMaxDuration = 56;
inline constexpr int kDefaultTimestepRate = 4;

/// A quantized note: pitch and velocity in MIDI units, start and duration in
/// timesteps.
struct Note {
  int pitch = 60;
  std::int64_t start = 0;
  int duration = 1;
  int velocity = 64;

  friend bool operator==(const Note&, const Note&) = default;
};

/// Canonical note order: start, then pitch, then velocity, then duration.
inline bool note_order(const Note& a, const Note& b) {
  return std::tie(a.start, a.pitch, a.velocity, a.duration) <
         std::tie(b.start, b.pitch, b.velocity, b.duration);
}

inline bool is_valid(const Note& n) {
  return n.pitch >= 0 && n.pitch <= kMaxPitch && n.velocity >= 0 &&
         n.velocity <= kMaxVelocity && n.start >= 0 &&
         n.duration >= kMinDuration && n.duration <= kMaxDuration;
}

inline int clamp_duration(std::int64_t d) {
  return static_cast<int>(std::clamp<std::int64_t>(d, kMinDuration, kMaxDuration));
}

/// A single-instrument piece on a timestep grid of `timestep_rate` steps per
/// second. Notes are kept in canonical order.
struct Piece {
  std::vector<Note> notes;
  int timestep_rate = kDefaultTimestepRate;

  friend bool operator==(const Piece&, const Piece&) = default;

  void sort() { std::sort(notes.begin(), notes.end(), note_order); }

  bool empty() const { return notes.empty(); }

  /// One past the last timestep touched by any sounding note.
  std::int64_t end_timestep() const {
    std::int64_t end = 0;
    for (const auto& n : notes) end = std::max(end, n.start + n.duration);
    return end;
  }
};

inline bool is_valid(const Piece& p) {
  if (p.timestep_rate < 1) return false;
  if (!std::is_sorted(p.notes.begin(), p.notes.end(), note_order)) return false;
  return std::all_of(p.notes.begin(), p.notes.end(),
                     [](const Note& n) { return is_valid(n); });
}

inline void validate(const Piece& p) {
  if (p.timestep_rate < 1)
    throw Error(ErrorCode::InvalidParams, "timestep_rate must be >= 1");
  for (const auto& n : p.notes)
    if (!is_valid(n))
      throw Error(ErrorCode::InvalidParams,
                  "note out of range: pitch " + std::to_string(n.pitch) +
                      " start " + std::to_string(n.start) + " duration " +
                      std::to_string(n.duration) + " velocity " +
                      std::to_string(n.velocity));
  if (!std::is_sorted(p.notes.begin(), p.notes.end(), note_order))
    throw Error(ErrorCode::InvalidParams, "piece notes are not in canonical order");
}

}  // namespace bardo

#endif  // BARDO_CODEC_NOTE_HPP
