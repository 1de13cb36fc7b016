#include <doctest.h>

#include <set>

#include "corpus.hpp"
#include "gen.hpp"
#include "subguard/archive.hpp"
#include "subguard/error.hpp"
#include "zip_writer.hpp"

using namespace subguard;
namespace fs = std::filesystem;

namespace {

// Path-stack resolution written independently of the library.
std::optional<std::string> resolve_oracle(const std::string& raw) {
  std::string s = raw;
  std::replace(s.begin(), s.end(), '\\', '/');
  if (!s.empty() && s[0] == '/') return std::nullopt;
  if (s.size() >= 2 && std::isalpha(static_cast<unsigned char>(s[0])) && s[1] == ':') return std::nullopt;
  std::vector<std::string> stack;
  std::size_t i = 0;
  while (i <= s.size()) {
    const auto j = std::min(s.find('/', i), s.size());
    const auto part = s.substr(i, j - i);
    i = j + 1;
    if (part.empty() || part == ".") continue;
    if (part == "..") {
      if (stack.empty()) return std::nullopt;
      stack.pop_back();
    } else {
      stack.push_back(part);
    }
  }
  std::string out;
  for (const auto& p : stack) out += (out.empty() ? "" : "/") + p;
  return out;
}

bool is_under(const fs::path& p, const fs::path& root) {
  const auto rel = fs::weakly_canonical(p).lexically_relative(fs::weakly_canonical(root));
  return !rel.empty() && *rel.begin() != "..";
}

std::size_t count_files(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) n += e.is_regular_file() ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("listing a simple archive") {
  const auto zip = testing::make_zip({{"a/b.srt", "x"}});
  const auto list = list_zip(zip);
  REQUIRE(list.size() == 1);
  CHECK(list[0].raw_name == "a/b.srt");
  CHECK(list[0].normalized == "a/b.srt");
  CHECK(list[0].uncompressed_size == 1);
  CHECK_FALSE(list[0].is_dir);
}

TEST_CASE("the traversal fixture escapes") {
  const auto list = list_zip(testing::read_file(testing::corpus_dir() / "malicious/traversal.zip"));
  REQUIRE(list.size() == 2);
  CHECK_FALSE(list[0].escapes());
  CHECK(list[1].escapes());
}

TEST_CASE("damaged archives are rejected") {
  const auto zip = testing::make_zip({{"a.srt", "hello"}, {"b.srt", "world"}});
  // Cutting into the end record leaves a central directory with no end.
  CHECK_THROWS_AS(list_zip(zip.substr(0, zip.size() - 10)), CorruptCentralDirectory);
  CHECK_THROWS_AS(list_zip("definitely not a zip"), NotAZip);
  CHECK_THROWS_AS(list_zip(""), NotAZip);
  // An end record that points outside the buffer.
  std::string bad = zip;
  bad[bad.size() - 6] = '\x7f';
  CHECK_THROWS_AS(list_zip(bad), CorruptCentralDirectory);
}

TEST_CASE("declared entry counts cannot outrun the directory size") {
  // End record alone, claiming 65535 entries in an empty directory.
  std::string eocd = std::string("PK\x05\x06", 4) + std::string(4, '\0') + "\xff\xff\xff\xff" + std::string(10, '\0');
  CHECK_THROWS_AS(list_zip(eocd), CorruptCentralDirectory);
}

TEST_CASE("normalization matches a path-stack oracle") {
  CHECK(normalize_entry_name("a/./b//c") == "a/b/c");
  CHECK(normalize_entry_name("a\\..\\b") == "b");
  CHECK_FALSE(normalize_entry_name("../x").has_value());
  CHECK_FALSE(normalize_entry_name("/etc/passwd").has_value());
  CHECK_FALSE(normalize_entry_name("C:\\x").has_value());
  CHECK(normalize_entry_name("a/..") == "");
  testing::Gen g(11);
  const std::vector<std::string> frags = {"..", ".", "/", "\\", "a", "bb", "C:", "//", "x.srt", "\xff", " "};
  for (int i = 0; i < 20000; ++i) {
    const auto s = g.from_fragments(frags, 10);
    CAPTURE(s);
    REQUIRE(normalize_entry_name(s) == resolve_oracle(s));
  }
}

TEST_CASE("reading entries") {
  const std::string big(10000, 'z');
  const auto zip = testing::make_zip({{"s.txt", "stored"}, {"d.txt", big, true}});
  const auto list = list_zip(zip);
  CHECK(read_entry(zip, list[0]) == "stored");
  CHECK(read_entry(zip, list[1]) == big);
  CHECK_THROWS_AS(read_entry(zip, list[1], 100), IoFailure);
  auto broken = list[0];
  broken.crc32 ^= 1;
  CHECK_THROWS_AS(read_entry(zip, broken), CorruptCentralDirectory);
}

TEST_CASE("extracting a benign archive") {
  const auto dest = testing::scratch_dir("benign");
  const auto zip = testing::make_zip({{"en/a.srt", "one", true}, {"b.srt", "two"}});
  const auto r = safe_extract(zip, dest);
  CHECK(r.written == std::vector<std::string>{"en/a.srt", "b.srt"});
  CHECK(r.findings.empty());
  CHECK(testing::read_file(dest / "en/a.srt") == "one");
  CHECK(testing::read_file(dest / "b.srt") == "two");
}

TEST_CASE("strict mode refuses traversal before writing") {
  const auto dest = testing::scratch_dir("strict") / "out";
  std::vector<fs::path> writes;
  const auto zip = testing::read_file(testing::corpus_dir() / "malicious/traversal.zip");
  CHECK_THROWS_AS(safe_extract(zip, dest, ExtractMode::Strict, [&](const fs::path& p) { writes.push_back(p); }),
                  TraversalRefused);
  CHECK(writes.empty());
  CHECK_FALSE(fs::exists(dest));
}

TEST_CASE("lenient mode writes only contained entries") {
  const auto dest = testing::scratch_dir("lenient");
  std::vector<fs::path> writes;
  const auto zip = testing::read_file(testing::corpus_dir() / "malicious/traversal.zip");
  const auto r = safe_extract(zip, dest, ExtractMode::Lenient, [&](const fs::path& p) { writes.push_back(p); });
  CHECK(r.written == std::vector<std::string>{"Subtitles.srt"});
  REQUIRE(r.findings.size() == 1);
  CHECK(r.findings[0].rule == RuleId::Traversal);
  CHECK(r.findings[0].cve == "CVE-2017-8314");
  for (const auto& w : writes) CHECK(is_under(w, dest));
  CHECK(count_files(dest) == 1);
}

TEST_CASE("symlinks are neither created nor followed") {
  const auto base = testing::scratch_dir("links");
  const auto dest = base / "dest";
  const auto outside = base / "outside";
  fs::create_directories(dest);
  fs::create_directories(outside);
  fs::create_directory_symlink(outside, dest / "link");
  fs::create_symlink(outside / "f.srt", dest / "file_link.srt");
  const auto zip = testing::make_zip({{"link/x.srt", "via dir link"},
                                      {"file_link.srt", "via file link"},
                                      {"ln", "/etc/passwd", false, true},
                                      {"ok.srt", "fine"}});
  const auto r = safe_extract(zip, dest, ExtractMode::Lenient);
  CHECK(r.written == std::vector<std::string>{"ok.srt"});
  CHECK(r.findings.size() == 3);
  CHECK(fs::is_empty(outside));
  CHECK_FALSE(fs::exists(dest / "ln"));
}

TEST_CASE("duplicate names: the last entry wins") {
  const auto dest = testing::scratch_dir("dups");
  const auto zip = testing::make_zip({{"a.srt", "first"}, {"./a.srt", "second"}});
  const auto r = safe_extract(zip, dest);
  CHECK(testing::read_file(dest / "a.srt") == "second");
  REQUIRE(r.findings.size() == 1);
  CHECK(r.findings[0].rule == RuleId::Hazard);
}

TEST_CASE("unsupported entries are skipped with a finding") {
  const auto dest = testing::scratch_dir("enc");
  const auto zip = testing::make_zip({{"secret.srt", "x", false, false, true}, {"ok.srt", "y"}});
  const auto r = safe_extract(zip, dest);
  CHECK(r.written == std::vector<std::string>{"ok.srt"});
  CHECK(r.findings.size() == 1);
}

TEST_CASE("containment over generated archives") {
  testing::Gen g(3);
  const std::vector<std::string> frags = {"..", ".", "/", "\\", "a", "b", "sub/", "x.srt", "../", "/etc"};
  const auto base = testing::scratch_dir("contain");
  for (int i = 0; i < 150; ++i) {
    std::vector<testing::ZipEntry> entries;
    for (int k = g.range(1, 5); k > 0; --k) {
      auto name = g.from_fragments(frags, 6);
      if (name.empty()) name = "e";
      entries.push_back({name, "data" + std::to_string(k), g.chance(0.5)});
    }
    const auto zip = testing::make_zip(entries);
    const auto dest = base / std::to_string(i);
    std::vector<fs::path> writes;
    try {
      safe_extract(zip, dest, ExtractMode::Lenient, [&](const fs::path& p) { writes.push_back(p); });
    } catch (const IoFailure&) {
      // e.g. a file and a directory claiming the same name
    }
    for (const auto& w : writes) REQUIRE(is_under(w, dest));
    // Nothing escaped into the shared parent.
    for (const auto& e : fs::directory_iterator(base)) {
      REQUIRE(e.is_directory());
    }
  }
}
