#pragma once

#include <cstddef>

namespace subguard {

/// Resource limits every parser enforces.
struct ParseLimits {
  /// VLC's own line reader caps lines at this size.
  std::size_t max_line_bytes = 204800;
  std::size_t max_cues = 100000;
  /// Maximum number of simultaneously open markup elements.
  std::size_t max_span_depth = 32;

  /// Throws std::invalid_argument when any field is zero.
  void validate() const;
};

}  // namespace subguard
