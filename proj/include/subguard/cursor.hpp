#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "subguard/error.hpp"

namespace subguard {

/// Counters collected while a CursorAudit is active on the current thread.
struct CursorStats {
  std::uint64_t reads = 0;          // peek/advance calls across all cursors
  std::uint64_t cursors = 0;        // cursors constructed
  std::uint64_t violations = 0;     // attempted reads or advances past end
  std::uint64_t overconsumed = 0;   // cursors whose consumed bytes exceeded their size
};

/// RAII scope that instruments every ByteCursor created on this thread.
///
/// With a non-zero work limit, exceeding it throws WorkBoundExceeded from the
/// cursor doing the read; this is how the fuzz harness turns a runaway loop
/// into a reportable failure instead of a hang. Audits nest; the innermost
/// one receives the counts.
class CursorAudit {
 public:
  explicit CursorAudit(std::uint64_t work_limit = 0);
  ~CursorAudit();
  CursorAudit(const CursorAudit&) = delete;
  CursorAudit& operator=(const CursorAudit&) = delete;

  const CursorStats& stats() const noexcept { return stats_; }
  std::uint64_t work_limit() const noexcept { return work_limit_; }

  static CursorAudit* current() noexcept;

 private:
  friend class ByteCursor;
  void on_read();
  void on_violation() noexcept { ++stats_.violations; }

  CursorStats stats_;
  std::uint64_t work_limit_;
  CursorAudit* previous_;
};

/// Forward-only reader over a byte range. Every access is bounds-checked:
/// reading past the end throws InvariantViolation rather than touching memory
/// outside the view.
class ByteCursor {
 public:
  explicit ByteCursor(std::string_view data) noexcept;
  ~ByteCursor();
  ByteCursor(const ByteCursor&) = delete;
  ByteCursor& operator=(const ByteCursor&) = delete;

  bool at_end() const noexcept { return pos_ >= data_.size(); }
  std::size_t pos() const noexcept { return pos_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool has(std::size_t n) const noexcept { return n <= remaining(); }

  /// Byte at pos()+ahead. Caller must have checked has(ahead + 1).
  char peek(std::size_t ahead = 0) const;
  /// Byte at pos()+ahead, or '\0' when that is past the end.
  char peek_or_nul(std::size_t ahead = 0) const;
  char next();
  void advance(std::size_t n = 1);
  /// Moves to an absolute position at or after the current one.
  void seek(std::size_t absolute);

  std::string_view rest() const noexcept { return data_.substr(pos_); }
  std::string_view slice(std::size_t from, std::size_t to) const;
  std::string_view data() const noexcept { return data_; }

  bool starts_with(std::string_view prefix) const noexcept;
  bool starts_with_icase(std::string_view prefix) const noexcept;

 private:
  void count_read() const;
  [[noreturn]] void fail(const char* what) const;

  std::string_view data_;
  std::size_t pos_ = 0;
  CursorAudit* audit_;
};

}  // namespace subguard
