#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subguard {

/// Base of every error the toolkit raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A ParseLimits field was breached. Resource-exhaustion defense, not a
/// statement about malformed input.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

class UnknownFormat : public Error {
 public:
  using Error::Error;
};

/// The format was recognised but has no parser (SSA/ASS, WebVTT, SubViewer).
class ConversionUnsupported : public UnknownFormat {
 public:
  using UnknownFormat::UnknownFormat;
};

/// A byte cursor was asked to read or advance past the end of its buffer, or
/// a post-condition the toolkit guarantees did not hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Raised by an audited cursor when the total number of byte reads exceeds
/// the work bound configured on the active CursorAudit.
class WorkBoundExceeded : public Error {
 public:
  using Error::Error;
};

class NotAZip : public Error {
 public:
  using Error::Error;
};

class CorruptCentralDirectory : public Error {
 public:
  using Error::Error;
};

class TraversalRefused : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class EmptyMovieTags : public Error {
 public:
  using Error::Error;
};

class ManifestUnreadable : public Error {
 public:
  using Error::Error;
};

class ManifestSyntax : public Error {
 public:
  ManifestSyntax(std::size_t line, const std::string& what)
      : Error("manifest line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class NotReproducible : public Error {
 public:
  using Error::Error;
};

}  // namespace subguard
