#ifndef BARDO_CODEC_SMF_HPP
#define BARDO_CODEC_SMF_HPP

// Byte-level Standard MIDI File reading and writing. Events keep absolute
// ticks; deltas are only materialized on write.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bardo/error.hpp"

namespace bardo::smf {

inline constexpr std::uint8_t kNoteOff = 0x80;
inline constexpr std::uint8_t kNoteOn = 0x90;
inline constexpr std::uint8_t kProgramChange = 0xC0;
inline constexpr std::uint8_t kMeta = 0xFF;
inline constexpr std::uint8_t kMetaTempo = 0x51;
inline constexpr std::uint8_t kMetaEndOfTrack = 0x2F;
inline constexpr std::uint32_t kDefaultTempo = 500000;  // us per quarter note

struct Event {
  std::uint64_t tick = 0;
  std::uint8_t status = 0;     // channel status, 0xF0/0xF7 sysex or 0xFF meta
  std::uint8_t meta_type = 0;  // meta events only
  std::vector<std::uint8_t> data;

  bool is_channel() const { return status >= 0x80 && status < 0xF0; }
  bool is_meta() const { return status == kMeta; }
  std::uint8_t kind() const { return status & 0xF0; }
  int channel() const { return status & 0x0F; }
};

struct Track {
  std::vector<Event> events;
  std::vector<std::uint8_t> raw;  // chunk payload exactly as read
};

struct File {
  std::uint16_t format = 0;
  std::uint16_t division = 480;
  std::vector<Track> tracks;

  bool smpte() const { return (division & 0x8000) != 0; }
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t pos() const { return pos_; }

  std::uint8_t peek() const {
    need(1);
    return bytes_[pos_];
  }
  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((bytes_[pos_] << 8) | bytes_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::uint32_t vlq() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if (!(b & 0x80)) return v;
    }
    throw Error(ErrorCode::MalformedMidi, "variable-length quantity longer than 4 bytes");
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (remaining() < n)
      throw Error(ErrorCode::MalformedMidi,
                  "truncated MIDI data at byte " + std::to_string(pos_));
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline int channel_data_length(std::uint8_t status) {
  switch (status & 0xF0) {
    case 0xC0:
    case 0xD0: return 1;
    default: return 2;
  }
}

inline std::vector<Event> parse_track(std::span<const std::uint8_t> payload) {
  Reader in(payload);
  std::vector<Event> events;
  std::uint64_t tick = 0;
  std::uint8_t running = 0;
  while (!in.done()) {
    tick += in.vlq();
    Event ev;
    ev.tick = tick;
    std::uint8_t b = in.peek();
    if (b & 0x80) {
      in.u8();
      ev.status = b;
    } else {
      if (running == 0)
        throw Error(ErrorCode::MalformedMidi, "data byte without running status");
      ev.status = running;
    }
    if (ev.is_channel()) {
      running = ev.status;
      for (int i = 0; i < channel_data_length(ev.status); ++i) {
        std::uint8_t d = in.u8();
        if (d & 0x80) throw Error(ErrorCode::MalformedMidi, "status byte inside channel event");
        ev.data.push_back(d);
      }
    } else if (ev.status == kMeta) {
      running = 0;
      ev.meta_type = in.u8();
      auto body = in.take(in.vlq());
      ev.data.assign(body.begin(), body.end());
    } else if (ev.status == 0xF0 || ev.status == 0xF7) {
      running = 0;
      auto body = in.take(in.vlq());
      ev.data.assign(body.begin(), body.end());
    } else {
      throw Error(ErrorCode::MalformedMidi, "unexpected status byte in track");
    }
    bool eot = ev.is_meta() && ev.meta_type == kMetaEndOfTrack;
    events.push_back(std::move(ev));
    if (eot) break;
  }
  return events;
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline void put_vlq(std::vector<std::uint8_t>& out, std::uint32_t v) {
  std::uint8_t buf[5];
  int n = 0;
  buf[n++] = v & 0x7F;
  while (v >>= 7) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
  while (n) out.push_back(buf[--n]);
}

}  // namespace detail

/// Parses a format 0 or 1 file. Unknown chunk types are skipped.
inline File read(std::span<const std::uint8_t> bytes) {
  detail::Reader in(bytes);
  auto magic = in.take(4);
  if (!std::equal(magic.begin(), magic.end(), "MThd"))
    throw Error(ErrorCode::MalformedMidi, "missing MThd header");
  std::uint32_t header_len = in.u32();
  if (header_len < 6) throw Error(ErrorCode::MalformedMidi, "MThd chunk too short");
  File file;
  file.format = in.u16();
  std::uint16_t ntracks = in.u16();
  file.division = in.u16();
  in.take(header_len - 6);
  if (file.format > 1)
    throw Error(ErrorCode::MalformedMidi, "unsupported SMF format " + std::to_string(file.format));
  if (file.division == 0) throw Error(ErrorCode::MalformedMidi, "zero time division");

  while (file.tracks.size() < ntracks) {
    if (in.done())
      throw Error(ErrorCode::MalformedMidi,
                  "expected " + std::to_string(ntracks) + " tracks, found " +
                      std::to_string(file.tracks.size()));
    auto id = in.take(4);
    std::uint32_t len = in.u32();
    auto payload = in.take(len);
    if (!std::equal(id.begin(), id.end(), "MTrk")) continue;
    Track track;
    track.raw.assign(payload.begin(), payload.end());
    track.events = detail::parse_track(payload);
    file.tracks.push_back(std::move(track));
  }
  return file;
}

/// Serializes tracks from their events (raw payloads are ignored). Events
/// must be in non-decreasing tick order; an end-of-track meta is appended
/// when missing.
inline std::vector<std::uint8_t> write(const File& file) {
  std::vector<std::uint8_t> out{'M', 'T', 'h', 'd'};
  detail::put_u32(out, 6);
  detail::put_u16(out, file.format);
  detail::put_u16(out, static_cast<std::uint16_t>(file.tracks.size()));
  detail::put_u16(out, file.division);
  for (const auto& track : file.tracks) {
    std::vector<std::uint8_t> body;
    std::uint64_t tick = 0;
    bool has_eot = false;
    for (const auto& ev : track.events) {
      if (ev.tick < tick) throw Error(ErrorCode::InvalidParams, "track events out of order");
      detail::put_vlq(body, static_cast<std::uint32_t>(ev.tick - tick));
      tick = ev.tick;
      body.push_back(ev.status);
      if (ev.is_meta()) {
        body.push_back(ev.meta_type);
        detail::put_vlq(body, static_cast<std::uint32_t>(ev.data.size()));
        has_eot = ev.meta_type == kMetaEndOfTrack;
      } else if (!ev.is_channel()) {
        detail::put_vlq(body, static_cast<std::uint32_t>(ev.data.size()));
      }
      body.insert(body.end(), ev.data.begin(), ev.data.end());
    }
    if (!has_eot) {
      detail::put_vlq(body, 0);
      body.insert(body.end(), {kMeta, kMetaEndOfTrack, 0x00});
    }
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    detail::put_u32(out, static_cast<std::uint32_t>(body.size()));
    out.insert(out.end(), body.begin(), body.end());
  }
  return out;
}

/// Re-emits a file keeping only the selected tracks, copying their chunk
/// payloads byte for byte.
inline std::vector<std::uint8_t> write_raw_tracks(const File& file,
                                                  const std::vector<std::size_t>& keep) {
  std::vector<std::uint8_t> out{'M', 'T', 'h', 'd'};
  detail::put_u32(out, 6);
  detail::put_u16(out, file.format);
  detail::put_u16(out, static_cast<std::uint16_t>(keep.size()));
  detail::put_u16(out, file.division);
  for (std::size_t i : keep) {
    const auto& raw = file.tracks.at(i).raw;
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    detail::put_u32(out, static_cast<std::uint32_t>(raw.size()));
    out.insert(out.end(), raw.begin(), raw.end());
  }
  return out;
}

/// Maps absolute ticks to seconds through the file's tempo map.
class TempoMap {
 public:
  explicit TempoMap(const File& file) : division_(file.division) {
    for (const auto& track : file.tracks)
      for (const auto& ev : track.events)
        if (ev.is_meta() && ev.meta_type == kMetaTempo && ev.data.size() == 3)
          changes_.push_back({ev.tick, static_cast<std::uint32_t>(
                                           (ev.data[0] << 16) | (ev.data[1] << 8) | ev.data[2])});
    std::stable_sort(changes_.begin(), changes_.end(),
                     [](const Change& a, const Change& b) { return a.tick < b.tick; });
    // Seconds elapsed at each change point.
    std::uint64_t tick = 0;
    std::uint32_t tempo = kDefaultTempo;
    double seconds = 0.0;
    for (auto& c : changes_) {
      seconds += span_seconds(c.tick - tick, tempo);
      c.seconds = seconds;
      tick = c.tick;
      tempo = c.tempo;
    }
  }

  double seconds(std::uint64_t tick) const {
    if (division_ & 0x8000) {
      int fps = -static_cast<std::int8_t>(division_ >> 8);
      int per_frame = division_ & 0xFF;
      double rate = (fps == 29 ? 29.97 : fps) * per_frame;
      return static_cast<double>(tick) / rate;
    }
    auto it = std::upper_bound(changes_.begin(), changes_.end(), tick,
                               [](std::uint64_t t, const Change& c) { return t < c.tick; });
    if (it == changes_.begin()) return span_seconds(tick, kDefaultTempo);
    --it;
    return it->seconds + span_seconds(tick - it->tick, it->tempo);
  }

 private:
  struct Change {
    std::uint64_t tick;
    std::uint32_t tempo;
    double seconds = 0.0;
  };

  double span_seconds(std::uint64_t ticks, std::uint32_t tempo) const {
    return static_cast<double>(ticks) * tempo / (1e6 * division_);
  }

  std::uint16_t division_;
  std::vector<Change> changes_;
};

}  // namespace bardo::smf

#endif  // BARDO_CODEC_SMF_HPP
