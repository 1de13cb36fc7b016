#pragma once

// Minimal zip writer for fixtures: stored or raw-deflate entries, arbitrary
// names, optional symlink/encrypted flags. Written from the public format
// description, independent of the library's reader.

#include <zlib.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace testing {

struct ZipEntry {
  std::string name;
  std::string data;
  bool deflate = false;
  bool symlink = false;
  bool encrypted = false;
};

namespace zipdetail {

inline void put16(std::string& s, std::uint32_t v) {
  s += static_cast<char>(v & 0xff);
  s += static_cast<char>((v >> 8) & 0xff);
}
inline void put32(std::string& s, std::uint32_t v) {
  put16(s, v & 0xffff);
  put16(s, v >> 16);
}

inline std::string raw_deflate(const std::string& in) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw std::runtime_error("deflateInit2");
  }
  std::string out(deflateBound(&zs, in.size()) + 16, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  if (deflate(&zs, Z_FINISH) != Z_STREAM_END) throw std::runtime_error("deflate");
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

}  // namespace zipdetail

inline std::string make_zip(const std::vector<ZipEntry>& entries) {
  using zipdetail::put16;
  using zipdetail::put32;
  std::string out, cd;
  for (const auto& e : entries) {
    const std::uint32_t crc =
        static_cast<std::uint32_t>(crc32(0, reinterpret_cast<const Bytef*>(e.data.data()), static_cast<uInt>(e.data.size())));
    const std::string body = e.deflate ? zipdetail::raw_deflate(e.data) : e.data;
    const std::uint16_t method = e.deflate ? 8 : 0;
    const std::uint16_t flags = e.encrypted ? 1 : 0;
    const auto offset = static_cast<std::uint32_t>(out.size());

    put32(out, 0x04034b50);
    put16(out, 20);
    put16(out, flags);
    put16(out, method);
    put16(out, 0);
    put16(out, 0);
    put32(out, crc);
    put32(out, static_cast<std::uint32_t>(body.size()));
    put32(out, static_cast<std::uint32_t>(e.data.size()));
    put16(out, static_cast<std::uint32_t>(e.name.size()));
    put16(out, 0);
    out += e.name;
    out += body;

    put32(cd, 0x02014b50);
    put16(cd, e.symlink ? (3u << 8) | 20 : 20);  // made by: unix when a mode is needed
    put16(cd, 20);
    put16(cd, flags);
    put16(cd, method);
    put16(cd, 0);
    put16(cd, 0);
    put32(cd, crc);
    put32(cd, static_cast<std::uint32_t>(body.size()));
    put32(cd, static_cast<std::uint32_t>(e.data.size()));
    put16(cd, static_cast<std::uint32_t>(e.name.size()));
    put16(cd, 0);
    put16(cd, 0);
    put16(cd, 0);
    put16(cd, 0);
    put32(cd, e.symlink ? 0120777u << 16 : 0);
    put32(cd, offset);
    cd += e.name;
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out += cd;
  put32(out, 0x06054b50);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint32_t>(entries.size()));
  put16(out, static_cast<std::uint32_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(cd.size()));
  put32(out, cd_offset);
  put16(out, 0);
  return out;
}

}  // namespace testing
