#pragma once

// Binary trace format, version 1. All integers are unsigned little-endian,
// all reals IEEE-754 binary64 little-endian.
//
//   header
//     0   4  magic "CSTR"
//     4   4  u32 format_version
//     8   8  f64 dt (s)
//    16   8  u64 agent_count N
//    24  32N N x { u64 agent_id, f64 radius, f64 desired_speed, f64 max_speed }
//   frames, repeated until end of file
//     +0  8  u64 payload_bytes = 16 + 40 * record_count
//     +8  8  u64 step_index
//    +16  8  u64 record_count
//    +24 40R R x { u64 agent_id, f64 px, f64 py, f64 vx, f64 vy }
//
// Frames list active agents only, sorted by agent_id.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "crowdsim/engine.hpp"
#include "crowdsim/error.hpp"
#include "crowdsim/geometry.hpp"

namespace crowdsim {

inline constexpr std::array<char, 4> kTraceMagic = {'C', 'S', 'T', 'R'};
inline constexpr std::uint32_t kTraceFormatVersion = 1;
inline constexpr std::size_t kTraceHeaderFixedBytes = 24;
inline constexpr std::size_t kTraceAgentEntryBytes = 32;
inline constexpr std::size_t kTraceRecordBytes = 40;
inline constexpr std::size_t kTraceFramePrefixBytes = 8;
inline constexpr std::size_t kTraceFrameFixedBytes = 16;

struct AgentStatic {
  std::uint64_t agent_id = 0;
  double radius = 0.0;
  double desired_speed = 0.0;
  double max_speed = 0.0;
  bool operator==(const AgentStatic&) const = default;
};

struct TraceHeader {
  std::uint32_t format_version = kTraceFormatVersion;
  double dt = 0.1;
  std::vector<AgentStatic> agents;
  bool operator==(const TraceHeader&) const = default;
};

struct TraceRecord {
  std::uint64_t agent_id = 0;
  Vec2 position;
  Vec2 velocity;
  bool operator==(const TraceRecord&) const = default;
};

struct TraceFrame {
  std::uint64_t step_index = 0;
  std::vector<TraceRecord> records;
  bool operator==(const TraceFrame&) const = default;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceFrame> frames;
  bool operator==(const Trace&) const = default;
};

inline TraceHeader make_trace_header(double dt, std::span<const AgentState> agents) {
  TraceHeader h;
  h.dt = dt;
  h.agents.reserve(agents.size());
  for (const AgentState& a : agents) {
    h.agents.push_back({a.agent_id, a.radius, a.desired_speed, a.max_speed});
  }
  std::sort(h.agents.begin(), h.agents.end(),
            [](const AgentStatic& a, const AgentStatic& b) { return a.agent_id < b.agent_id; });
  return h;
}

inline TraceFrame make_trace_frame(std::uint64_t step_index, std::span<const AgentState> state) {
  TraceFrame f;
  f.step_index = step_index;
  for (const AgentState& a : state) {
    if (a.active) {
      f.records.push_back({a.agent_id, a.position, a.velocity});
    }
  }
  std::sort(f.records.begin(), f.records.end(),
            [](const TraceRecord& a, const TraceRecord& b) { return a.agent_id < b.agent_id; });
  return f;
}

namespace detail {

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::span<const char> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }

  void flush_to(std::ostream& out) {
    out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
    bytes_.clear();
    if (!out) {
      throw Error(ErrorCode::kIoError, "failed writing trace stream");
    }
  }

 private:
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const char> data) : data_(data) {}

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    }
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_++])) << (8 * i);
    }
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }

 private:
  std::span<const char> data_;
  std::size_t pos_ = 0;
};

/// Reads exactly `count` bytes; returns how many were available.
inline std::size_t read_up_to(std::istream& in, std::vector<char>& buffer, std::size_t count) {
  buffer.resize(count);
  in.read(buffer.data(), static_cast<std::streamsize>(count));
  return static_cast<std::size_t>(in.gcount());
}

}  // namespace detail

/// Streams a trace: header on construction, then one frame per call.
class TraceWriter {
 public:
  TraceWriter(std::ostream& out, const TraceHeader& header) : out_(out) {
    detail::ByteWriter w;
    w.raw(kTraceMagic);
    w.u32(header.format_version);
    w.f64(header.dt);
    w.u64(header.agents.size());
    for (const AgentStatic& a : header.agents) {
      w.u64(a.agent_id);
      w.f64(a.radius);
      w.f64(a.desired_speed);
      w.f64(a.max_speed);
    }
    w.flush_to(out_);
  }

  void write(const TraceFrame& frame) {
    if (frames_written_ > 0 && frame.step_index <= last_step_) {
      throw Error(ErrorCode::kValidationError, "trace frame step_index must increase");
    }
    const bool sorted = std::is_sorted(
        frame.records.begin(), frame.records.end(),
        [](const TraceRecord& a, const TraceRecord& b) { return a.agent_id < b.agent_id; });
    if (!sorted) {
      throw Error(ErrorCode::kValidationError, "trace records must be sorted by agent_id");
    }
    detail::ByteWriter w;
    w.u64(kTraceFrameFixedBytes + kTraceRecordBytes * frame.records.size());
    w.u64(frame.step_index);
    w.u64(frame.records.size());
    for (const TraceRecord& r : frame.records) {
      w.u64(r.agent_id);
      w.f64(r.position.x);
      w.f64(r.position.y);
      w.f64(r.velocity.x);
      w.f64(r.velocity.y);
    }
    w.flush_to(out_);
    last_step_ = frame.step_index;
    ++frames_written_;
  }

 private:
  std::ostream& out_;
  std::uint64_t last_step_ = 0;
  std::size_t frames_written_ = 0;
};

/// Streams a trace back. Errors carry the byte offset where the problem starts.
class TraceReader {
 public:
  explicit TraceReader(std::istream& in) : in_(in) {
    std::vector<char> buf;
    if (detail::read_up_to(in_, buf, kTraceHeaderFixedBytes) < kTraceHeaderFixedBytes) {
      if (buf.size() >= 4 && !std::equal(kTraceMagic.begin(), kTraceMagic.end(), buf.begin())) {
        throw Error(ErrorCode::kBadMagic, "not a trace file (offset 0)");
      }
      throw Error(ErrorCode::kTruncatedFrame, "truncated trace header at offset 0");
    }
    if (!std::equal(kTraceMagic.begin(), kTraceMagic.end(), buf.begin())) {
      throw Error(ErrorCode::kBadMagic, "not a trace file (offset 0)");
    }
    detail::ByteReader r(std::span<const char>(buf).subspan(4));
    header_.format_version = r.u32();
    if (header_.format_version != kTraceFormatVersion) {
      throw Error(ErrorCode::kVersionUnsupported,
                  "trace format version " + std::to_string(header_.format_version));
    }
    header_.dt = r.f64();
    const std::uint64_t count = r.u64();
    offset_ = kTraceHeaderFixedBytes;

    const std::size_t table_bytes = kTraceAgentEntryBytes * count;
    if (detail::read_up_to(in_, buf, table_bytes) < table_bytes) {
      throw Error(ErrorCode::kTruncatedFrame,
                  "truncated agent table at offset " + std::to_string(offset_));
    }
    detail::ByteReader t(buf);
    header_.agents.resize(count);
    for (AgentStatic& a : header_.agents) {
      a.agent_id = t.u64();
      a.radius = t.f64();
      a.desired_speed = t.f64();
      a.max_speed = t.f64();
    }
    offset_ += table_bytes;
  }

  const TraceHeader& header() const { return header_; }

  /// Byte offset of the next frame.
  std::size_t offset() const { return offset_; }

  /// False at a clean end of stream.
  bool next(TraceFrame& frame) {
    std::vector<char>& buf = buffer_;
    const std::size_t got = detail::read_up_to(in_, buf, kTraceFramePrefixBytes);
    if (got == 0) {
      return false;
    }
    const std::size_t frame_start = offset_;
    if (got < kTraceFramePrefixBytes) {
      throw truncated(frame_start);
    }
    const std::uint64_t payload = detail::ByteReader(buf).u64();
    if (payload < kTraceFrameFixedBytes ||
        (payload - kTraceFrameFixedBytes) % kTraceRecordBytes != 0) {
      throw Error(ErrorCode::kValidationError,
                  "corrupt frame length at offset " + std::to_string(frame_start));
    }
    if (detail::read_up_to(in_, buf, payload) < payload) {
      throw truncated(frame_start);
    }
    detail::ByteReader r(buf);
    frame.step_index = r.u64();
    const std::uint64_t count = r.u64();
    if (kTraceFrameFixedBytes + kTraceRecordBytes * count != payload) {
      throw Error(ErrorCode::kValidationError,
                  "frame record count disagrees with length at offset " +
                      std::to_string(frame_start));
    }
    frame.records.resize(count);
    for (TraceRecord& rec : frame.records) {
      rec.agent_id = r.u64();
      rec.position.x = r.f64();
      rec.position.y = r.f64();
      rec.velocity.x = r.f64();
      rec.velocity.y = r.f64();
    }
    offset_ += kTraceFramePrefixBytes + payload;
    return true;
  }

 private:
  static Error truncated(std::size_t frame_start) {
    return Error(ErrorCode::kTruncatedFrame,
                 "truncated frame at offset " + std::to_string(frame_start));
  }

  std::istream& in_;
  TraceHeader header_;
  std::size_t offset_ = 0;
  std::vector<char> buffer_;
};

inline void write_trace(std::ostream& out, const TraceHeader& header,
                        std::span<const TraceFrame> frames) {
  TraceWriter writer(out, header);
  for (const TraceFrame& f : frames) {
    writer.write(f);
  }
}

inline Trace read_trace(std::istream& in) {
  TraceReader reader(in);
  Trace trace;
  trace.header = reader.header();
  TraceFrame frame;
  while (reader.next(frame)) {
    trace.frames.push_back(frame);
  }
  return trace;
}

}  // namespace crowdsim
