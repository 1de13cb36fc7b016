#include "subguard/limits.hpp"

#include <stdexcept>

namespace subguard {

void ParseLimits::validate() const {
  if (max_line_bytes == 0) throw std::invalid_argument("max_line_bytes must be positive");
  if (max_cues == 0) throw std::invalid_argument("max_cues must be positive");
  if (max_span_depth == 0) throw std::invalid_argument("max_span_depth must be positive");
}

}  // namespace subguard
