#pragma once

// Line-level grammar shared by the format probe and the parsers.

#include <cstdint>
#include <optional>
#include <string_view>

#include "subguard/model.hpp"

namespace subguard::grammar {

struct TimeRange {
  TimeStamp start;
  TimeStamp end;
};

/// "HH:MM:SS,mmm --> HH:MM:SS,mmm", also accepting "->" and '.' before the
/// milliseconds; trailing coordinates after the second time are ignored.
std::optional<TimeRange> parse_srt_timing(std::string_view line);

/// True for a line holding only an unsigned decimal (surrounding blanks allowed).
bool is_index_line(std::string_view line);

/// JACOsub "H:MM:SS.FF" at the start of `s`. `units_per_second` scales FF.
struct JssTime {
  std::int64_t millis = 0;
  std::size_t length = 0;
};
std::optional<JssTime> parse_jss_time(std::string_view s, std::uint64_t units_per_second,
                                      std::size_t max_fraction_digits = 4);

/// Two JACOsub times with two-digit fractions separated by blanks, at line start.
bool is_jss_timing_line(std::string_view line);

/// "{int}{int}" at the start of `s`; sets the frames and the prefix length.
bool parse_microdvd_frames(std::string_view s, std::uint64_t& start, std::uint64_t& end,
                           std::size_t& length);

}  // namespace subguard::grammar
