#ifndef BARDO_CODEC_MIDI_HPP
#define BARDO_CODEC_MIDI_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "bardo/codec/note.hpp"
#include "bardo/codec/smf.hpp"
#include "bardo/log.hpp"

namespace bardo {

/// Round-to-nearest, halves away from zero.
inline std::int64_t quantize(double seconds, int timestep_rate) {
  return std::llround(seconds * timestep_rate);
}

/// Extracts quantized notes from a format 0/1 file.
///
/// Each NOTE_ON (velocity > 0) is paired first-in first-out with the next
/// NOTE_OFF (or NOTE_ON velocity 0) on the same track, channel and pitch.
/// Onset and release are converted to seconds through the tempo map, rounded
/// to the timestep grid, and the duration is the difference of the rounded
/// endpoints clamped to [1, 56]. Notes still sounding at the end of a track
/// are closed there.
inline Piece parse_midi(std::span<const std::uint8_t> bytes,
                        int timestep_rate = kDefaultTimestepRate) {
  if (timestep_rate < 1) throw Error(ErrorCode::InvalidParams, "timestep_rate must be >= 1");
  const smf::File file = smf::read(bytes);
  const smf::TempoMap tempo(file);

  Piece piece;
  piece.timestep_rate = timestep_rate;
  auto add = [&](std::uint64_t on, std::uint64_t off, int pitch, int velocity) {
    std::int64_t start = quantize(tempo.seconds(on), timestep_rate);
    std::int64_t end = quantize(tempo.seconds(off), timestep_rate);
    piece.notes.push_back({pitch, start, clamp_duration(end - start), velocity});
  };

  for (std::size_t t = 0; t < file.tracks.size(); ++t) {
    const auto& events = file.tracks[t].events;
    std::map<std::pair<int, int>, std::deque<std::pair<std::uint64_t, int>>> open;
    for (const auto& ev : events) {
      if (!ev.is_channel()) continue;
      const auto kind = ev.kind();
      if (kind != smf::kNoteOn && kind != smf::kNoteOff) continue;
      const int pitch = ev.data[0];
      const int velocity = ev.data[1];
      auto& pending = open[{ev.channel(), pitch}];
      if (kind == smf::kNoteOn && velocity > 0) {
        pending.emplace_back(ev.tick, velocity);
      } else if (!pending.empty()) {
        add(pending.front().first, ev.tick, pitch, pending.front().second);
        pending.pop_front();
      }
    }
    const std::uint64_t last_tick = events.empty() ? 0 : events.back().tick;
    for (auto& [key, pending] : open) {
      for (const auto& [on, velocity] : pending) {
        logger()->warn("track {}: NOTE_ON pitch {} channel {} never released; closing at end of track",
                       t, key.second, key.first);
        add(on, last_tick, key.second, velocity);
      }
    }
  }
  piece.sort();
  return piece;
}

inline Piece parse_midi(const std::vector<std::uint8_t>& bytes,
                        int timestep_rate = kDefaultTimestepRate) {
  return parse_midi(std::span<const std::uint8_t>(bytes), timestep_rate);
}

/// Renders a piece as a single-track format 0 file that parse_midi maps back
/// to the same piece.
///
/// A quarter note lasts exactly one second and each timestep spans a whole
/// number of ticks. Same-pitch notes that overlap are spread over separate
/// channels (never channel 9) so the FIFO pairing in parse_midi recovers
/// them; every channel used is set to program 0. Velocity 0 cannot be
/// expressed as a sounding NOTE_ON and is written as 1.
inline std::vector<std::uint8_t> write_midi(const Piece& piece) {
  validate(piece);
  if (piece.timestep_rate > 0x7FFF)
    throw Error(ErrorCode::InvalidParams, "timestep_rate too large for an SMF division");
  const int ticks_per_step = std::max(1, std::min(96, 0x7FFF / piece.timestep_rate));

  smf::File file;
  file.format = 0;
  file.division = static_cast<std::uint16_t>(piece.timestep_rate * ticks_per_step);
  smf::Track track;
  constexpr std::uint32_t kOneSecond = 1000000;
  track.events.push_back({0, smf::kMeta, smf::kMetaTempo,
                          {static_cast<std::uint8_t>(kOneSecond >> 16),
                           static_cast<std::uint8_t>(kOneSecond >> 8),
                           static_cast<std::uint8_t>(kOneSecond)}});

  static constexpr std::array<int, 15> kChannels = {0, 1, 2, 3, 4, 5, 6, 7,
                                                    8, 10, 11, 12, 13, 14, 15};
  // busy_until[channel][pitch]: first timestep at which the voice is free.
  std::array<std::array<std::int64_t, 128>, 16> busy_until{};
  std::array<bool, 16> used{};

  struct Timed {
    std::uint64_t tick;
    int order;  // 0 = release, 1 = onset
    int channel;
    int pitch;
    int velocity;
  };
  std::vector<Timed> timed;
  timed.reserve(piece.notes.size() * 2);
  for (const auto& n : piece.notes) {
    int channel = kChannels[0];
    std::int64_t earliest = busy_until[channel][n.pitch];
    for (int c : kChannels) {
      if (busy_until[c][n.pitch] <= n.start) {
        channel = c;
        earliest = -1;
        break;
      }
      if (busy_until[c][n.pitch] < earliest) {
        channel = c;
        earliest = busy_until[c][n.pitch];
      }
    }
    if (earliest >= 0)
      logger()->warn("more than 15 overlapping voices on pitch {}; pairing may shift", n.pitch);
    busy_until[channel][n.pitch] = std::max(busy_until[channel][n.pitch], n.start + n.duration);
    used[channel] = true;
    const auto on = static_cast<std::uint64_t>(n.start) * ticks_per_step;
    const auto off = static_cast<std::uint64_t>(n.start + n.duration) * ticks_per_step;
    timed.push_back({on, 1, channel, n.pitch, std::max(1, n.velocity)});
    timed.push_back({off, 0, channel, n.pitch, 0});
  }
  std::stable_sort(timed.begin(), timed.end(), [](const Timed& a, const Timed& b) {
    return std::tie(a.tick, a.order, a.channel, a.pitch) <
           std::tie(b.tick, b.order, b.channel, b.pitch);
  });

  for (int c = 0; c < 16; ++c)
    if (used[c])
      track.events.push_back({0, static_cast<std::uint8_t>(smf::kProgramChange | c), 0, {0}});
  for (const auto& e : timed) {
    const std::uint8_t status =
        static_cast<std::uint8_t>((e.order ? smf::kNoteOn : smf::kNoteOff) | e.channel);
    track.events.push_back({e.tick, status, 0,
                            {static_cast<std::uint8_t>(e.pitch),
                             static_cast<std::uint8_t>(e.velocity)}});
  }
  file.tracks.push_back(std::move(track));
  return smf::write(file);
}

}  // namespace bardo

#endif  // BARDO_CODEC_MIDI_HPP
