#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subguard/finding.hpp"

namespace subguard {

struct ArchiveEntrySummary {
  std::string raw_name;                   // bytes as stored in the central directory
  std::optional<std::string> normalized;  // nullopt: the name escapes the root
  bool is_dir = false;
  bool is_symlink = false;
  bool encrypted = false;
  std::uint16_t method = 0;
  std::uint32_t crc32 = 0;
  std::uint64_t compressed_size = 0;
  std::uint64_t uncompressed_size = 0;
  std::uint64_t local_header_offset = 0;

  bool escapes() const noexcept { return !normalized.has_value(); }
};

/// Lexical resolution of an entry name. Backslashes are separators; "." and
/// empty components vanish; ".." pops. Returns nullopt when the name is
/// absolute (leading '/', or a drive letter) or pops past the root.
std::optional<std::string> normalize_entry_name(std::string_view raw);

/// Reads the central directory only. Throws NotAZip when no end-of-central-
/// directory record exists and the data does not look like a zip at all;
/// CorruptCentralDirectory for anything out of bounds, zip64 or multi-disk.
std::vector<ArchiveEntrySummary> list_zip(std::string_view source);

/// Decompressed contents of one entry (stored or deflate), CRC-checked.
/// Throws CorruptCentralDirectory on bad offsets or data and IoFailure for
/// unsupported methods or entries larger than `max_bytes`.
std::string read_entry(std::string_view source, const ArchiveEntrySummary& entry,
                       std::uint64_t max_bytes = 64ull << 20);

enum class ExtractMode { Strict, Lenient };

struct ExtractResult {
  std::vector<std::string> written;  // relative paths; directories end in '/'
  std::vector<Finding> findings;
};

/// Called with the absolute path of every file or directory about to be
/// created.
using WriteObserver = std::function<void(const std::filesystem::path&)>;

/// Extracts under dest_root without ever writing outside it. Strict mode
/// throws TraversalRefused before writing anything if any entry escapes;
/// lenient mode skips such entries with a finding. Symlink entries are never
/// materialised and pre-existing symlinks under dest_root are never followed.
ExtractResult safe_extract(std::string_view source, const std::filesystem::path& dest_root,
                           ExtractMode mode = ExtractMode::Strict, const WriteObserver& observer = {});

}  // namespace subguard
