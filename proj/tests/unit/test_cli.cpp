#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "corpus.hpp"
#include "subguard/cli.hpp"
#include "zip_writer.hpp"

using namespace subguard;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "subguard");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus(const std::string& rel) { return (testing::corpus_dir() / rel).string(); }

std::vector<nlohmann::json> json_lines(const std::string& s) {
  std::vector<nlohmann::json> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

void write(const fs::path& p, const std::string& data) {
  std::ofstream(p, std::ios::binary) << data;
}

const std::string kMovie = "Trolls.2016.BDRip.x264-[YTS.AG].mp4";

}  // namespace

TEST_CASE("usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"detect"}).code == kExitUsage);
  CHECK(cli({"scan", "--policy", "paranoid", corpus("benign")}).code == kExitUsage);
  CHECK(cli({"convert", corpus("benign/movie.sub"), "--to", "vtt"}).code == kExitUsage);
  CHECK(cli({"zipcheck", corpus("benign/subs.zip"), "--strict", "--lenient"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("detect") {
  auto r = cli({"detect", corpus("benign/movie.sub")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("microdvd") != std::string::npos);
  r = cli({"detect", corpus("benign/movie.smi"), corpus("benign/karaoke.jss"), "--json"});
  const auto j = json_lines(r.out);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["format"] == "sami");
  CHECK(j[1]["format"] == "jacosub");
  const auto dir = testing::scratch_dir("cli_detect");
  write(dir / "notes.txt", "nothing to see\n");
  CHECK(cli({"detect", (dir / "notes.txt").string()}).code == kExitUnparseable);
  CHECK(cli({"detect", (dir / "missing.srt").string()}).code == kExitUsage);
}

TEST_CASE("convert") {
  auto r = cli({"convert", corpus("benign/movie.sub")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("1\n", 0) == 0);
  CHECK(r.out.find(" --> ") != std::string::npos);

  const auto dir = testing::scratch_dir("cli_convert");
  r = cli({"convert", corpus("golden/hello_world.srt"), "-o", (dir / "out.srt").string()});
  CHECK(r.code == kExitOk);
  CHECK(testing::read_file(dir / "out.srt") == testing::read_file(corpus("golden/hello_world.srt")));

  r = cli({"convert", corpus("benign/simple.jss"), "--json"});
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["format"] == "jacosub");
  CHECK(j["cues"].get<int>() > 0);
  CHECK(j["srt"].get<std::string>() == cli({"convert", corpus("benign/simple.jss")}).out);

  write(dir / "x.ass", "[Script Info]\nTitle: x\n");
  CHECK(cli({"convert", (dir / "x.ass").string()}).code == kExitUnparseable);
  write(dir / "empty.srt", "");
  CHECK(cli({"convert", (dir / "empty.srt").string()}).code == kExitUnparseable);
  // A line over the cap is refused, not truncated.
  CHECK(cli({"convert", corpus("benign/hello_world.srt"), "--max-line-bytes", "4"}).code == kExitUnparseable);
}

TEST_CASE("scan exit codes on the corpora") {
  CHECK(cli({"scan", corpus("benign")}).code == kExitOk);
  CHECK(cli({"scan", corpus("malicious")}).code == kExitFindings);
  CHECK(cli({"scan", corpus("benign"), corpus("malicious/stremio_banner.srt")}).code == kExitFindings);
  // The stricter policy strips the banner before the scan sees it.
  CHECK(cli({"scan", corpus("malicious/stremio_banner.srt"), "--policy", "strict"}).code == kExitOk);
  CHECK(cli({"scan", corpus("benign/none.srt")}).code == kExitUsage);
  const auto dir = testing::scratch_dir("cli_scan");
  write(dir / "notes.txt", "plain notes\n");
  CHECK(cli({"scan", (dir / "notes.txt").string()}).code == kExitUnparseable);
}

TEST_CASE("scan text and json agree") {
  const auto text = cli({"scan", corpus("malicious")});
  const auto json = cli({"scan", corpus("malicious"), "--json"});
  CHECK(text.code == json.code);
  const auto lines = json_lines(json.out);
  CHECK(lines.size() == testing::corpus_files("malicious").size());
  for (const auto& j : lines) {
    const auto target = j["target"].get<std::string>();
    const auto n = j["findings"].size();
    const auto header = target + ": " + j["verdict"].get<std::string>() + " (" + std::to_string(n) +
                        (n == 1 ? " finding)" : " findings)");
    CHECK(text.out.find(header) != std::string::npos);
    for (const auto& f : j["findings"]) CHECK(text.out.find(f["rule_id"].get<std::string>()) != std::string::npos);
  }
}

TEST_CASE("rank") {
  const auto dir = testing::scratch_dir("cli_rank");
  const auto both = dir / "both.jsonl";
  write(both, testing::read_file(corpus("ranking/trolls.jsonl")) + testing::read_file(corpus("ranking/crafted.jsonl")));
  auto r = cli({"rank", "--repo", both.string(), "--imdb", "tt1679335", "--movie", kMovie, "--json"});
  CHECK(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.size() == 21);
  CHECK(j[0]["uploader_name"] == "goldmember");
  CHECK(j[0]["total"] == "15.000");
  r = cli({"rank", "--repo", both.string(), "--imdb", "1679335", "--movie", kMovie});
  CHECK(r.out.rfind("  1    15.000", 0) == 0);

  CHECK(cli({"rank", "--repo", (dir / "none.jsonl").string(), "--imdb", "1"}).code == kExitUsage);
  write(dir / "bad.jsonl", "{broken\n");
  CHECK(cli({"rank", "--repo", (dir / "bad.jsonl").string(), "--imdb", "1"}).code == kExitUnparseable);
  CHECK(cli({"rank", "--repo", both.string(), "--imdb", "abc"}).code == kExitUsage);
  CHECK(cli({"rank", "--repo", both.string(), "--imdb", "1679335", "--movie", "..."}).code == kExitUsage);
  write(dir / "cfg.json", R"({"tag_max_score": -2})");
  CHECK(cli({"rank", "--repo", both.string(), "--imdb", "1", "--config", (dir / "cfg.json").string()}).code ==
        kExitUnparseable);
}

TEST_CASE("sanitize") {
  auto r = cli({"sanitize", corpus("malicious/popcorntime_malicious.srt"), "--policy", "strict"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("<img") == std::string::npos);
  CHECK(r.out.find("pwn") != std::string::npos);
  CHECK(r.err.find("onerror") != std::string::npos);
  r = cli({"sanitize", corpus("malicious/popcorntime_malicious.srt"), "--policy", "strict", "--json"});
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["policy"] == "strict");
  CHECK(j["findings"].size() == 3);
  CHECK(cli({"scan", corpus("malicious/popcorntime_malicious.srt"), "--policy", "strict"}).code == kExitOk);
}

TEST_CASE("zipcheck") {
  auto r = cli({"zipcheck", corpus("benign/subs.zip")});
  CHECK(r.code == kExitOk);
  r = cli({"zipcheck", corpus("malicious/traversal.zip")});
  CHECK(r.code == kExitFindings);
  CHECK(r.out.find("CVE-2017-8314") != std::string::npos);

  const auto base = testing::scratch_dir("cli_zip");
  r = cli({"zipcheck", corpus("malicious/traversal.zip"), "--extract", (base / "strict").string(), "--json"});
  CHECK(r.code == kExitFindings);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["refused"] == true);
  CHECK(j["written"].empty());
  CHECK_FALSE(fs::exists(base / "strict"));

  r = cli({"zipcheck", corpus("malicious/traversal.zip"), "--extract", (base / "lenient").string(), "--lenient",
           "--json"});
  j = nlohmann::json::parse(r.out);
  CHECK(j["written"] == nlohmann::json::array({"Subtitles.srt"}));
  CHECK(fs::exists(base / "lenient/Subtitles.srt"));

  write(base / "junk.zip", "not a zip at all");
  CHECK(cli({"zipcheck", (base / "junk.zip").string()}).code == kExitUnparseable);
  write(base / "ok.zip", testing::make_zip({{"a.srt", "x"}}));
  CHECK(cli({"zipcheck", (base / "ok.zip").string(), "--extract", (base / "ok").string()}).code == kExitOk);
}

TEST_CASE("fuzz") {
  auto r = cli({"fuzz", "--format", "srt", "--corpus", corpus("fuzz/srt"), "--iterations", "200", "--seed", "0xC0FFEE"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("srt: 200 cases, 0 failures", 0) == 0);
  r = cli({"fuzz", "--format", "sami", "--corpus", corpus("fuzz/sami"), "--iterations", "50", "--json"});
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["total_cases"] == 50);
  CHECK(j["failures"].empty());
  CHECK(cli({"fuzz", "--format", "ass", "--corpus", corpus("fuzz/srt")}).code == kExitUsage);
  CHECK(cli({"fuzz", "--format", "srt", "--corpus", corpus("fuzz/srt"), "--operators", "nope"}).code == kExitUsage);
  CHECK(cli({"fuzz", "--format", "srt", "--corpus", corpus("fuzz/srt"), "--seed", "zz"}).code == kExitUsage);
  CHECK(cli({"fuzz", "--format", "srt", "--corpus", corpus("nowhere")}).code == kExitUsage);
  CHECK(cli({"fuzz", "--format", "srt", "--corpus", corpus("fuzz/srt"), "--iterations", "0"}).code == kExitUsage);
}
