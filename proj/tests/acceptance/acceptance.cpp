// One line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "subguard/archive.hpp"
#include "subguard/cursor.hpp"
#include "subguard/error.hpp"
#include "subguard/parsers.hpp"
#include "subguard/ranking.hpp"
#include "subguard/robustness.hpp"
#include "subguard/threatscan.hpp"

using namespace subguard;
namespace fs = std::filesystem;

namespace {

const std::string kMovie = "Trolls.2016.BDRip.x264-[YTS.AG].mp4";
const std::string kSub = "Trolls.2016.BDRip.x264-[YTS.AG].srt";

struct Check {
  bool ok = true;
  std::string why;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why = what;
    ok = ok && cond;
  }
};

RepoEntry entry(bool registered, std::uint64_t uploads) {
  RepoEntry e;
  e.subtitle_filename = kSub;
  e.imdb_id = "1679335";
  e.uploader.name = "u";
  e.uploader.registered = registered;
  e.uploader.upload_count = uploads;
  return e;
}

void ranking_ladder(Check& c) {
  const auto anon = score(entry(false, 0), "1679335", std::nullopt).total();
  const auto tags = score(entry(false, 0), "1679335", kMovie).total();
  const auto gold = score(entry(true, 101), "1679335", kMovie).total();
  c.expect(anon == Score(5), "imdb only: " + format_score(anon));
  c.expect(tags == Score(12), "imdb + tags: " + format_score(tags));
  c.expect(gold == Score(15), "imdb + tags + gold: " + format_score(gold));
}

void manipulation(Check& c) {
  RepoStore store;
  store.ingest(testing::corpus_dir() / "ranking/trolls.jsonl");
  const auto before = store.search("1679335", kMovie);
  Score best(0), sum(0);
  for (const auto& r : before) {
    best = std::max(best, r.breakdown.total());
    sum += r.breakdown.total();
  }
  c.expect(before.size() == 20, "expected 20 benign rows");
  c.expect(best <= Score(14), "benign maximum above 14: " + format_score(best));
  store.ingest(testing::corpus_dir() / "ranking/crafted.jsonl");
  const auto after = store.search("1679335", kMovie);
  c.expect(!after.empty() && after.front().entry.uploader.name == "goldmember", "crafted entry not ranked first");
  c.expect(!after.empty() && after.front().breakdown.total() == Score(15), "crafted entry total is not 15");
  if (c.ok) {
    c.why = "benign max " + format_score(best) + ", avg " + format_score(sum / Score(before.size())) +
            ", crafted 15.000 ranked first";
  }
}

void tag_list(Check& c) {
  const std::vector<std::string> want = {"Trolls", "2016", "BDRip", "x264", "YTS", "AG", "mp4"};
  c.expect(tokenize_tags(kMovie) == want, "tag list mismatch");
  c.expect(match_tags(kMovie, kSub) == Score(7), "identical tags do not score 7");
}

void detection(Check& c) {
  const std::map<std::string, std::pair<RuleId, std::string>> expected = {
      {"Subtitles.srt&link=attacker.com%2Fevil.zip&ID=-1", {RuleId::ParamInj, ""}},
      {"cve_2017_8310.srt", {RuleId::Hazard, "CVE-2017-8310"}},
      {"cve_2017_8311.jss", {RuleId::Hazard, "CVE-2017-8311"}},
      {"cve_2017_8312.jss", {RuleId::Hazard, "CVE-2017-8312"}},
      {"cve_2017_8313.jss", {RuleId::Hazard, "CVE-2017-8313"}},
      {"popcorntime_malicious.srt", {RuleId::Script, ""}},
      {"stremio_banner.srt", {RuleId::ExtRes, ""}},
      {"traversal.zip", {RuleId::Traversal, "CVE-2017-8314"}},
  };
  std::size_t hits = 0, clean = 0;
  const auto malicious = testing::corpus_files("malicious");
  c.expect(malicious.size() == expected.size(), "attack corpus size changed");
  for (const auto& p : malicious) {
    const auto it = expected.find(p.filename().string());
    if (it == expected.end()) {
      c.expect(false, "unexpected attack file " + p.filename().string());
      continue;
    }
    const auto r = scan_bytes(p.string(), testing::read_file(p));
    bool found = false;
    for (const auto& f : r.findings) {
      found |= f.rule == it->second.first && (it->second.second.empty() || f.cve == it->second.second);
    }
    c.expect(r.verdict != Verdict::Clean && found, "missed " + p.filename().string());
    hits += found ? 1 : 0;
  }
  const auto benign = testing::corpus_files("benign");
  for (const auto& p : benign) {
    const auto r = scan_bytes(p.string(), testing::read_file(p));
    c.expect(r.verdict == Verdict::Clean && !r.unparsed, "false positive on " + p.filename().string());
    clean += r.verdict == Verdict::Clean ? 1 : 0;
  }
  if (c.ok) {
    c.why = std::to_string(hits) + "/" + std::to_string(malicious.size()) + " attacks flagged, " +
            std::to_string(clean) + "/" + std::to_string(benign.size()) + " benign clean";
  }
}

void fuzzing(Check& c) {
  const std::vector<std::pair<FormatId, const char*>> formats = {
      {FormatId::Srt, "srt"}, {FormatId::JacoSub, "jacosub"}, {FormatId::MicroDvd, "microdvd"}, {FormatId::Sami, "sami"}};
  MutationConfig cfg;
  cfg.iterations = 100000;
  cfg.seed = 0xC0FFEE;
  std::ostringstream summary;
  for (const auto& [fmt, dir] : formats) {
    const auto out = fuzz_parser(fmt, testing::corpus_dir() / "fuzz" / dir, cfg);
    c.expect(out.total_cases == cfg.iterations, std::string(dir) + ": short run");
    if (!out.failures.empty()) {
      const auto& f = out.failures.front();
      c.expect(false, std::string(dir) + ": " + std::to_string(out.failures.size()) + " failures, first case " +
                          std::to_string(f.case_index) + " " + std::string(failure_kind_name(f.kind)) + ": " +
                          f.detail);
    }
    summary << (summary.tellp() ? ", " : "") << dir << " " << out.total_cases << "/" << out.failures.size();
  }
  if (c.ok) c.why = "cases/failures: " + summary.str();
}

void cve_regressions(Check& c) {
  const std::vector<std::tuple<std::string, FormatId, WarningCode>> cases = {
      {"cve_2017_8310.srt", FormatId::Srt, WarningCode::UnterminatedTag},
      {"cve_2017_8311.jss", FormatId::JacoSub, WarningCode::TruncatedEscape},
      {"cve_2017_8312.jss", FormatId::JacoSub, WarningCode::ShiftOutOfRange},
      {"cve_2017_8313.jss", FormatId::JacoSub, WarningCode::DirectiveUnterminated},
  };
  for (const auto& [name, fmt, code] : cases) {
    const auto src = testing::read_file(testing::corpus_dir() / "malicious" / name);
    CursorAudit audit;
    SubtitleDocument doc;
    try {
      doc = parse_as(fmt, src);
    } catch (const std::exception& e) {
      c.expect(false, name + " threw: " + e.what());
      continue;
    }
    c.expect(doc.has_warning(code), name + ": missing " + std::string(warning_name(code)));
    c.expect(audit.stats().violations == 0 && !audit.stats().overconsumed, name + ": out-of-bounds cursor access");
    c.expect(!doc.cues.empty(), name + ": no cues");
    for (std::size_t i = 0; i < doc.cues.size(); ++i) {
      const auto& q = doc.cues[i];
      c.expect(q.start <= q.end, name + ": cue ends before it starts");
      c.expect(i == 0 || doc.cues[i - 1].start <= q.start, name + ": cues out of order");
      c.expect(q.raw_location.byte_offset + q.raw_text.size() <= src.size(), name + ": raw span out of bounds");
    }
  }
}

void containment(Check& c) {
  const auto zip = testing::read_file(testing::corpus_dir() / "malicious/traversal.zip");
  const auto base = testing::scratch_dir("acceptance_zip");
  std::size_t strict_writes = 0;
  try {
    safe_extract(zip, base / "strict", ExtractMode::Strict, [&](const fs::path&) { ++strict_writes; });
    c.expect(false, "strict extraction did not refuse");
  } catch (const TraversalRefused&) {
  }
  c.expect(strict_writes == 0, "strict mode wrote files");
  c.expect(!fs::exists(base / "strict"), "strict mode created the destination");
  std::vector<fs::path> writes;
  const auto root = base / "lenient";
  const auto r = safe_extract(zip, root, ExtractMode::Lenient, [&](const fs::path& p) { writes.push_back(p); });
  const auto canon_root = fs::weakly_canonical(root).string() + "/";
  for (const auto& w : writes) {
    c.expect(fs::weakly_canonical(w).string().rfind(canon_root, 0) == 0, "write outside root: " + w.string());
  }
  std::size_t on_disk = 0;
  for (const auto& e : fs::recursive_directory_iterator(base)) on_disk += e.is_regular_file() ? 1 : 0;
  c.expect(on_disk == writes.size() && r.written.size() == writes.size(), "files on disk differ from the write set");
  if (c.ok) c.why = "strict 0 writes, lenient " + std::to_string(writes.size()) + " contained write(s)";
}

void golden_round_trip(Check& c) {
  const auto files = testing::corpus_files("golden");
  c.expect(!files.empty(), "no golden files");
  std::size_t canonical = 0;
  for (const auto& p : files) {
    const auto src = testing::read_file(p);
    const auto doc = parse_srt(src);
    const auto once = serialize_srt(doc);
    const auto back = parse_srt(once);
    c.expect(structurally_equal(doc, back), p.filename().string() + ": document changed");
    c.expect(serialize_srt(back) == once, p.filename().string() + ": second serialization differs");
    canonical += once == src ? 1 : 0;
  }
  if (c.ok) c.why = std::to_string(files.size()) + " files, " + std::to_string(canonical) + " already canonical";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
      {"ranking ladder 5 / 12 / 15", ranking_ladder},
      {"crafted upload outranks every benign entry", manipulation},
      {"tag list of the reference file name", tag_list},
      {"attack corpus flagged, benign corpus clean", detection},
      {"1e5 mutated inputs per parser without failure", fuzzing},
      {"CVE inputs yield warnings and valid documents", cve_regressions},
      {"archive extraction stays inside its root", containment},
      {"golden SRT round trip is a fixpoint", golden_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    failed += c.ok ? 0 : 1;
    std::cout << (c.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
    if (!c.why.empty()) std::cout << " (" << c.why << ")";
    std::cout << " [" << ms.count() << " ms]\n" << std::flush;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
