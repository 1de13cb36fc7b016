#include "subguard/archive.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstring>
#include <map>

#include "subguard/error.hpp"
#include "subguard/text.hpp"

namespace subguard {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kEocdSig = 0x06054b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::size_t kEocdSize = 22;
constexpr std::size_t kCentralSize = 46;
constexpr std::size_t kLocalSize = 30;
constexpr std::size_t kMaxCommentSearch = 65535 + kEocdSize;

std::uint16_t u16(std::string_view s, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}

std::uint32_t u32(std::string_view s, std::size_t at) {
  return static_cast<std::uint32_t>(u16(s, at)) | (static_cast<std::uint32_t>(u16(s, at + 2)) << 16);
}

std::optional<std::size_t> find_eocd(std::string_view s) {
  if (s.size() < kEocdSize) return std::nullopt;
  const std::size_t lowest = s.size() > kMaxCommentSearch ? s.size() - kMaxCommentSearch : 0;
  for (std::size_t pos = s.size() - kEocdSize + 1; pos-- > lowest;) {
    if (u32(s, pos) == kEocdSig && pos + kEocdSize + u16(s, pos + 20) <= s.size()) return pos;
  }
  return std::nullopt;
}

bool looks_like_zip(std::string_view s) {
  return s.starts_with(std::string_view("PK\x03\x04", 4)) ||
         s.find(std::string_view("PK\x01\x02", 4)) != std::string_view::npos;
}

bool is_drive_prefix(std::string_view s) {
  return s.size() >= 2 && text::is_alpha(s[0]) && s[1] == ':';
}

std::string describe_errno(const std::string& what, const fs::path& p) {
  return what + " " + p.string() + ": " + std::strerror(errno);
}

std::uint32_t crc_of(std::string_view data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + pos), chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string inflate_raw(std::string_view in, std::uint64_t expected, std::uint64_t max_bytes) {
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw IoFailure("inflateInit2 failed");
  std::string out;
  out.resize(static_cast<std::size_t>(std::min<std::uint64_t>(expected, max_bytes)));
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = Z_OK;
  // One spare byte of room detects data longer than declared.
  char spare = 0;
  while (rc == Z_OK) {
    if (zs.avail_out == 0) {
      if (zs.next_out == reinterpret_cast<Bytef*>(&spare) + 1) break;
      zs.next_out = reinterpret_cast<Bytef*>(&spare);
      zs.avail_out = 1;
    }
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc == Z_BUF_ERROR && zs.avail_in == 0) break;
  }
  const bool overflow = zs.next_out == reinterpret_cast<Bytef*>(&spare) + 1;
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (overflow) throw CorruptCentralDirectory("entry inflates beyond its declared size");
  if (rc != Z_STREAM_END) throw CorruptCentralDirectory("deflate stream is damaged or truncated");
  out.resize(produced);
  return out;
}

}  // namespace

std::optional<std::string> normalize_entry_name(std::string_view raw) {
  std::string name(raw);
  for (auto& c : name) {
    if (c == '\\') c = '/';
  }
  if (name.starts_with('/') || is_drive_prefix(name)) return std::nullopt;
  std::vector<std::string_view> parts;
  std::string_view rest(name);
  while (!rest.empty()) {
    const auto slash = rest.find('/');
    const auto part = rest.substr(0, slash);
    rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash + 1);
    if (part.empty() || part == ".") continue;
    if (part == "..") {
      if (parts.empty()) return std::nullopt;
      parts.pop_back();
      continue;
    }
    parts.push_back(part);
  }
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += '/';
    out += p;
  }
  return out;
}

std::vector<ArchiveEntrySummary> list_zip(std::string_view s) {
  const auto eocd = find_eocd(s);
  if (!eocd) {
    if (looks_like_zip(s)) throw CorruptCentralDirectory("end of central directory record missing");
    throw NotAZip("no end of central directory record");
  }
  const std::size_t e = *eocd;
  const std::uint16_t disk = u16(s, e + 4);
  const std::uint16_t cd_disk = u16(s, e + 6);
  const std::uint16_t on_disk = u16(s, e + 8);
  const std::uint16_t total = u16(s, e + 10);
  const std::uint32_t cd_size = u32(s, e + 12);
  const std::uint32_t cd_offset = u32(s, e + 16);
  if (disk != 0 || cd_disk != 0 || on_disk != total) throw CorruptCentralDirectory("multi-disk archives are not supported");
  if (total == 0xFFFF || cd_size == 0xFFFFFFFF || cd_offset == 0xFFFFFFFF) {
    throw CorruptCentralDirectory("zip64 archives are not supported");
  }
  if (static_cast<std::uint64_t>(cd_offset) + cd_size > e) {
    throw CorruptCentralDirectory("central directory lies outside the archive");
  }
  if (static_cast<std::uint64_t>(total) * kCentralSize > cd_size) {
    throw CorruptCentralDirectory("entry count does not fit the central directory");
  }

  std::vector<ArchiveEntrySummary> entries;
  entries.reserve(total);
  std::size_t pos = cd_offset;
  const std::size_t cd_end = static_cast<std::size_t>(cd_offset) + cd_size;
  for (std::uint16_t i = 0; i < total; ++i) {
    if (pos + kCentralSize > cd_end || u32(s, pos) != kCentralSig) {
      throw CorruptCentralDirectory("central directory record " + std::to_string(i) + " is damaged");
    }
    const std::uint16_t made_by = u16(s, pos + 4);
    const std::uint16_t flags = u16(s, pos + 8);
    const std::size_t name_len = u16(s, pos + 28);
    const std::size_t extra_len = u16(s, pos + 30);
    const std::size_t comment_len = u16(s, pos + 32);
    const std::size_t record_end = pos + kCentralSize + name_len + extra_len + comment_len;
    if (record_end > cd_end) {
      throw CorruptCentralDirectory("central directory record " + std::to_string(i) + " overruns");
    }
    ArchiveEntrySummary entry;
    entry.raw_name = std::string(s.substr(pos + kCentralSize, name_len));
    entry.method = u16(s, pos + 10);
    entry.crc32 = u32(s, pos + 16);
    entry.compressed_size = u32(s, pos + 20);
    entry.uncompressed_size = u32(s, pos + 24);
    entry.local_header_offset = u32(s, pos + 42);
    entry.encrypted = flags & 1;
    const std::uint32_t external = u32(s, pos + 38);
    const std::uint32_t mode = external >> 16;
    if ((made_by >> 8) == 3) entry.is_symlink = (mode & 0170000) == 0120000;
    entry.is_dir = entry.raw_name.ends_with('/') || entry.raw_name.ends_with('\\') ||
                   (!entry.is_symlink && (made_by >> 8) == 3 && (mode & 0170000) == 0040000);
    entry.normalized = normalize_entry_name(entry.raw_name);
    entries.push_back(std::move(entry));
    pos = record_end;
  }
  return entries;
}

std::string read_entry(std::string_view s, const ArchiveEntrySummary& entry, std::uint64_t max_bytes) {
  if (entry.encrypted) throw IoFailure("encrypted entries are not supported");
  if (entry.method != 0 && entry.method != 8) {
    throw IoFailure("compression method " + std::to_string(entry.method) + " is not supported");
  }
  if (entry.uncompressed_size > max_bytes) throw IoFailure("entry exceeds the extraction size limit");
  const std::uint64_t lh = entry.local_header_offset;
  if (lh + kLocalSize > s.size() || u32(s, lh) != kLocalSig) {
    throw CorruptCentralDirectory("local header of " + entry.raw_name + " is missing");
  }
  const std::uint64_t data = lh + kLocalSize + u16(s, lh + 26) + u16(s, lh + 28);
  if (data + entry.compressed_size > s.size()) {
    throw CorruptCentralDirectory("data of " + entry.raw_name + " lies outside the archive");
  }
  const auto raw = s.substr(data, entry.compressed_size);
  std::string out;
  if (entry.method == 0) {
    if (entry.compressed_size != entry.uncompressed_size) {
      throw CorruptCentralDirectory("stored entry sizes disagree");
    }
    out = std::string(raw);
  } else {
    out = inflate_raw(raw, entry.uncompressed_size, max_bytes);
  }
  if (out.size() != entry.uncompressed_size || crc_of(out) != entry.crc32) {
    throw CorruptCentralDirectory("CRC or size mismatch in " + entry.raw_name);
  }
  return out;
}

namespace {

// Creates (or verifies) every directory of `rel` under root without
// following symlinks. Returns false when a component is a symlink or a
// non-directory.
bool make_dirs(const fs::path& root, const std::vector<std::string>& parts, std::size_t count,
               const WriteObserver& observer, std::string& why) {
  fs::path cur = root;
  for (std::size_t i = 0; i < count; ++i) {
    cur /= parts[i];
    std::error_code ec;
    const auto st = fs::symlink_status(cur, ec);
    if (!ec && fs::is_symlink(st)) {
      why = "refusing to follow existing symlink " + cur.string();
      return false;
    }
    if (!ec && fs::exists(st)) {
      if (!fs::is_directory(st)) {
        why = cur.string() + " exists and is not a directory";
        return false;
      }
      continue;
    }
    if (observer) observer(cur);
    if (::mkdir(cur.c_str(), 0755) != 0 && errno != EEXIST) throw IoFailure(describe_errno("mkdir", cur));
  }
  return true;
}

std::vector<std::string> split_path(const std::string& normalized) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= normalized.size()) {
    auto slash = normalized.find('/', pos);
    if (slash == std::string::npos) slash = normalized.size();
    if (slash > pos) parts.push_back(normalized.substr(pos, slash - pos));
    pos = slash + 1;
  }
  return parts;
}

void write_file(const fs::path& path, std::string_view data) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_NOFOLLOW | O_CLOEXEC, 0644);
  if (fd < 0) throw IoFailure(describe_errno("open", path));
  std::size_t done = 0;
  while (done < data.size()) {
    const auto n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw IoFailure(describe_errno("write", path));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::close(fd) != 0) throw IoFailure(describe_errno("close", path));
}

}  // namespace

ExtractResult safe_extract(std::string_view source, const fs::path& dest_root, ExtractMode mode,
                           const WriteObserver& observer) {
  const auto entries = list_zip(source);
  ExtractResult result;

  for (const auto& e : entries) {
    if (!e.escapes()) continue;
    if (mode == ExtractMode::Strict) {
      throw TraversalRefused("entry '" + e.raw_name + "' escapes the extraction root");
    }
  }

  std::error_code ec;
  fs::create_directories(dest_root, ec);
  if (ec) throw IoFailure("cannot create " + dest_root.string() + ": " + ec.message());
  const fs::path root = fs::canonical(dest_root, ec);
  if (ec) throw IoFailure("cannot resolve " + dest_root.string() + ": " + ec.message());

  // Last entry with a given name wins.
  std::map<std::string, std::size_t> last;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].normalized) last[*entries[i].normalized] = i;
  }

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.escapes()) {
      result.findings.push_back(Finding::for_entry(RuleId::Traversal, "entry escapes the extraction root; skipped",
                                                   e.raw_name, "CVE-2017-8314"));
      continue;
    }
    const std::string& name = *e.normalized;
    if (last[name] != i) {
      result.findings.push_back(
          Finding::for_entry(RuleId::Hazard, "duplicate entry name; a later entry wins", e.raw_name));
      continue;
    }
    if (e.is_symlink) {
      result.findings.push_back(Finding::for_entry(RuleId::Hazard, "symlink entry not extracted", e.raw_name));
      continue;
    }
    if (name.find('\0') != std::string::npos) {
      result.findings.push_back(Finding::for_entry(RuleId::Hazard, "entry name contains NUL", e.raw_name));
      continue;
    }
    const auto parts = split_path(name);
    if (parts.empty()) continue;  // the root itself
    std::string why;
    if (e.is_dir) {
      if (!make_dirs(root, parts, parts.size(), observer, why)) {
        result.findings.push_back(Finding::for_entry(RuleId::Traversal, why, e.raw_name));
        continue;
      }
      result.written.push_back(name + "/");
      continue;
    }
    std::string data;
    try {
      data = read_entry(source, e);
    } catch (const Error& err) {
      result.findings.push_back(Finding::for_entry(RuleId::Hazard, err.what(), e.raw_name));
      continue;
    }
    if (!make_dirs(root, parts, parts.size() - 1, observer, why)) {
      result.findings.push_back(Finding::for_entry(RuleId::Traversal, why, e.raw_name));
      continue;
    }
    fs::path target = root;
    for (const auto& p : parts) target /= p;
    const auto st = fs::symlink_status(target, ec);
    if (!ec && fs::is_symlink(st)) {
      result.findings.push_back(
          Finding::for_entry(RuleId::Traversal, "refusing to overwrite symlink " + target.string(), e.raw_name));
      continue;
    }
    if (observer) observer(target);
    write_file(target, data);
    result.written.push_back(name);
  }
  return result;
}

}  // namespace subguard
