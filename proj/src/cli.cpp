#include "subguard/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "subguard/archive.hpp"
#include "subguard/detect.hpp"
#include "subguard/error.hpp"
#include "subguard/markup.hpp"
#include "subguard/parsers.hpp"
#include "subguard/ranking.hpp"
#include "subguard/robustness.hpp"
#include "subguard/sanitize.hpp"
#include "subguard/threatscan.hpp"

namespace subguard {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Carries an exit code out of a subcommand.
struct Exit {
  int code;
  std::string message;
};

std::string dump(const ojson& j) { return j.dump(-1, ' ', false, ojson::error_handler_t::replace); }

std::string read_file(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) throw Exit{kExitUsage, path + ": is a directory"};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kExitUsage, path + ": cannot read file"};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !f.write(data.data(), static_cast<std::streamsize>(data.size()))) {
    throw Exit{kExitUsage, path + ": cannot write file"};
  }
}

// "0xC0FFEE" and plain decimal.
std::uint64_t parse_seed(const std::string& s) {
  std::string_view v = s;
  int base = 10;
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    v.remove_prefix(2);
    base = 16;
  }
  std::uint64_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
  if (ec != std::errc() || end != v.data() + v.size()) throw Exit{kExitUsage, "invalid seed: " + s};
  return out;
}

void add_limit_options(CLI::App* cmd, ParseLimits& limits) {
  cmd->add_option("--max-line-bytes", limits.max_line_bytes, "Longest accepted line")->capture_default_str();
  cmd->add_option("--max-cues", limits.max_cues, "Most cues per document")->capture_default_str();
  cmd->add_option("--max-span-depth", limits.max_span_depth, "Deepest markup nesting")->capture_default_str();
}

void check_limits(const ParseLimits& limits) {
  try {
    limits.validate();
  } catch (const std::invalid_argument& e) {
    throw Exit{kExitUsage, e.what()};
  }
}

ojson location_json(const std::optional<Location>& loc) {
  return loc ? ojson{{"line", loc->line}, {"byte_offset", loc->byte_offset}} : ojson{{"line", nullptr}, {"byte_offset", nullptr}};
}

ojson finding_json(const Finding& f) {
  ojson o;
  o["rule_id"] = rule_name(f.rule);
  o["severity"] = severity_name(f.severity);
  o["cve"] = f.cve ? ojson(*f.cve) : ojson(nullptr);
  o["message"] = f.message;
  const auto loc = location_json(f.location);
  o["line"] = loc["line"];
  o["byte_offset"] = loc["byte_offset"];
  o["entry"] = f.entry ? ojson(*f.entry) : ojson(nullptr);
  return o;
}

std::string finding_text(const Finding& f) {
  std::string s = std::string(rule_name(f.rule)) + " " + std::string(severity_name(f.severity));
  if (f.cve) s += " " + *f.cve;
  if (f.location) s += " line " + std::to_string(f.location->line) + " offset " + std::to_string(f.location->byte_offset);
  if (f.entry) s += " entry \"" + *f.entry + "\"";
  return s + ": " + f.message;
}

ojson warnings_json(const SubtitleDocument& doc) {
  auto arr = ojson::array();
  for (const auto& w : doc.warnings) {
    arr.push_back({{"code", warning_name(w.code)},
                   {"message", w.message},
                   {"line", w.location.line},
                   {"byte_offset", w.location.byte_offset}});
  }
  return arr;
}

void print_warnings(std::ostream& err, const std::string& path, const SubtitleDocument& doc) {
  for (const auto& w : doc.warnings) {
    err << path << ":" << w.location.line << ": warning " << warning_name(w.code) << ": " << w.message << "\n";
  }
}

// Detects and parses, mapping unknown or detect-only formats to exit 2.
SubtitleDocument load_document(const std::string& bytes, const ParseLimits& limits) {
  if (bytes.empty()) throw Exit{kExitUnparseable, "empty input"};
  try {
    return parse_as(detect_format(bytes).format, bytes, limits);
  } catch (const UnknownFormat& e) {
    throw Exit{kExitUnparseable, e.what()};
  } catch (const LimitExceeded& e) {
    throw Exit{kExitUnparseable, std::string("limit exceeded: ") + e.what()};
  }
}

// --- detect -------------------------------------------------------------

struct DetectArgs {
  std::vector<std::string> paths;
  std::size_t probe_lines = 128;
  bool json = false;
};

int cmd_detect(const DetectArgs& a, std::ostream& out, std::ostream& err) {
  if (a.probe_lines == 0) throw Exit{kExitUsage, "--probe-lines must be positive"};
  int code = kExitOk;
  for (const auto& path : a.paths) {
    std::string bytes;
    try {
      bytes = read_file(path);
    } catch (const Exit& e) {
      err << e.message << "\n";
      code = std::max(code, e.code);
      continue;
    }
    const auto probe = detect_format(bytes, a.probe_lines);
    const bool unknown = probe.format == FormatId::Unknown;
    if (unknown) code = std::max<int>(code, kExitUnparseable);
    if (a.json) {
      ojson o;
      o["path"] = path;
      o["format"] = format_name(probe.format);
      o["confidence"] = confidence_name(probe.confidence);
      o["line"] = probe.matched_line ? ojson(probe.matched_line->line) : ojson(nullptr);
      out << dump(o) << "\n";
    } else if (unknown) {
      out << path << ": unknown\n";
    } else {
      out << path << ": " << format_name(probe.format) << " (" << confidence_name(probe.confidence) << ")\n";
    }
  }
  return code;
}

// --- convert ------------------------------------------------------------

struct ConvertArgs {
  std::string path;
  std::string to = "srt";
  std::string output;
  ParseLimits limits;
  bool json = false;
};

int cmd_convert(const ConvertArgs& a, std::ostream& out, std::ostream& err) {
  check_limits(a.limits);
  const auto bytes = read_file(a.path);
  const auto doc = load_document(bytes, a.limits);
  const auto srt = serialize_srt(doc);
  if (!a.output.empty()) write_file(a.output, srt);
  if (a.json) {
    ojson o;
    o["path"] = a.path;
    o["format"] = format_name(doc.format);
    o["cues"] = doc.cues.size();
    o["warnings"] = warnings_json(doc);
    o["output"] = a.output.empty() ? ojson(nullptr) : ojson(a.output);
    o["srt"] = a.output.empty() ? ojson(srt) : ojson(nullptr);
    out << dump(o) << "\n";
  } else {
    print_warnings(err, a.path, doc);
    if (a.output.empty()) out << srt;
  }
  return kExitOk;
}

// --- scan ---------------------------------------------------------------

struct ScanArgs {
  std::vector<std::string> paths;
  std::string policy = "none";
  ParseLimits limits;
  bool json = false;
};

// Directories expand to their regular files, recursively and sorted.
std::vector<std::string> expand_targets(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    std::error_code ec;
    if (!fs::is_directory(p, ec)) {
      out.push_back(p);
      continue;
    }
    std::vector<std::string> files;
    for (fs::recursive_directory_iterator it(p, ec), end; !ec && it != end; it.increment(ec)) {
      if (it->is_regular_file()) files.push_back(it->path().string());
    }
    if (ec) throw Exit{kExitUsage, p + ": " + ec.message()};
    std::sort(files.begin(), files.end());
    out.insert(out.end(), files.begin(), files.end());
  }
  return out;
}

int cmd_scan(const ScanArgs& a, std::ostream& out, std::ostream& err) {
  check_limits(a.limits);
  ScanOptions options;
  options.limits = a.limits;
  options.policy = *SanitizePolicy::from_name(a.policy);
  bool unreadable = false, dirty = false, unparsed = false;
  for (const auto& path : expand_targets(a.paths)) {
    std::string bytes;
    try {
      bytes = read_file(path);
    } catch (const Exit& e) {
      err << e.message << "\n";
      unreadable = true;
      continue;
    }
    const auto report = scan_bytes(path, bytes, options);
    dirty |= report.verdict != Verdict::Clean;
    unparsed |= report.unparsed;
    if (!report.note.empty()) err << path << ": " << report.note << "\n";
    if (a.json) {
      out << report_to_json(report) << "\n";
      continue;
    }
    out << path << ": " << verdict_name(report.verdict) << " (" << report.findings.size()
        << (report.findings.size() == 1 ? " finding" : " findings") << ")\n";
    for (const auto& f : report.findings) out << "  " << finding_text(f) << "\n";
  }
  if (unreadable) return kExitUsage;
  if (dirty) return kExitFindings;
  return unparsed ? kExitUnparseable : kExitOk;
}

// --- rank / serve -------------------------------------------------------

struct RankArgs {
  std::string repo;
  std::string imdb;
  std::string movie;
  std::string config;
  std::string bind = "127.0.0.1:8080";
  bool json = false;
};

ScoringConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  try {
    return ScoringConfig::from_json(read_file(path));
  } catch (const std::invalid_argument& e) {
    throw Exit{kExitUnparseable, path + ": " + e.what()};
  }
}

RepoStore load_store(const std::string& path, std::ostream& err) {
  RepoStore store;
  try {
    store.ingest(fs::path(path));
  } catch (const ManifestUnreadable& e) {
    throw Exit{kExitUsage, e.what()};
  } catch (const ManifestSyntax& e) {
    throw Exit{kExitUnparseable, path + ": " + e.what()};
  }
  for (const auto& w : store.warnings()) err << path << ": " << w << "\n";
  return store;
}

int cmd_rank(const RankArgs& a, std::ostream& out, std::ostream& err) {
  const auto config = load_config(a.config);
  const auto store = load_store(a.repo, err);
  const auto digits = std::string_view(a.imdb).substr(a.imdb.rfind("tt", 0) == 0 ? 2 : 0);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Exit{kExitUsage, "--imdb must be a numeric IMDb id"};
  }
  std::optional<std::string> movie;
  if (!a.movie.empty()) movie = a.movie;
  std::vector<ScoredResult> results;
  try {
    results = store.search(a.imdb, movie, config);
  } catch (const EmptyMovieTags& e) {
    throw Exit{kExitUsage, e.what()};
  }
  out << (a.json ? results_to_json(results) + "\n" : results_to_table(results));
  return kExitOk;
}

int cmd_serve(const RankArgs& a, std::ostream& out, std::ostream& err) {
  const auto colon = a.bind.rfind(':');
  int port = -1;
  if (colon != std::string::npos) {
    const auto p = std::string_view(a.bind).substr(colon + 1);
    const auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), port);
    if (ec != std::errc() || end != p.data() + p.size()) port = -1;
  }
  if (colon == std::string::npos || colon == 0 || port < 0 || port > 65535) {
    throw Exit{kExitUsage, "--bind expects host:port"};
  }
  const std::string host = a.bind.substr(0, colon);
  const auto config = load_config(a.config);
  const auto store = load_store(a.repo, err);
  if (a.json) {
    out << dump({{"listening", a.bind}, {"entries", store.entries().size()}}) << std::endl;
  } else {
    out << "serving " << store.entries().size() << " entries on http://" << a.bind << "/search" << std::endl;
  }
  if (!serve_search(store, config, host, port)) throw Exit{kExitUsage, "cannot bind " + a.bind};
  return kExitOk;
}

// --- sanitize -----------------------------------------------------------

struct SanitizeArgs {
  std::string path;
  std::string policy = "strict";
  ParseLimits limits;
  bool json = false;
};

int cmd_sanitize(const SanitizeArgs& a, std::ostream& out, std::ostream& err) {
  check_limits(a.limits);
  const auto policy = *SanitizePolicy::from_name(a.policy);
  const auto bytes = read_file(a.path);
  auto doc = load_document(bytes, a.limits);
  auto findings = ojson::array();
  for (std::size_t i = 0; i < doc.cues.size(); ++i) {
    auto result = sanitize(doc.cues[i].content, policy);
    for (const auto& f : result.findings) {
      if (a.json) {
        findings.push_back({{"cue", i + 1},
                            {"kind", sanitize_kind_name(f.kind)},
                            {"path", f.path},
                            {"tag", f.tag},
                            {"attribute", f.attribute},
                            {"message", f.message}});
      } else {
        err << a.path << ": cue " << i + 1 << " node " << f.path << ": " << sanitize_kind_name(f.kind) << " <"
            << f.tag << (f.attribute.empty() ? "" : " " + f.attribute) << ">: " << f.message << "\n";
      }
    }
    doc.cues[i].content = std::move(result.content);
  }
  const auto srt = serialize_srt(doc);
  if (a.json) {
    ojson o;
    o["path"] = a.path;
    o["policy"] = a.policy;
    o["findings"] = findings;
    o["srt"] = srt;
    out << dump(o) << "\n";
  } else {
    out << srt;
  }
  return kExitOk;
}

// --- zipcheck -----------------------------------------------------------

struct ZipArgs {
  std::string path;
  std::string extract;
  bool strict = false;
  bool lenient = false;
  bool json = false;
};

int cmd_zipcheck(const ZipArgs& a, std::ostream& out, std::ostream& err) {
  const auto bytes = read_file(a.path);
  try {
    if (a.extract.empty()) {
      const auto listing = list_zip(bytes);
      const auto findings = scan_archive(listing);
      if (a.json) {
        auto entries = ojson::array();
        for (const auto& e : listing) {
          entries.push_back({{"name", e.raw_name},
                             {"normalized", e.normalized ? ojson(*e.normalized) : ojson(nullptr)},
                             {"is_dir", e.is_dir},
                             {"is_symlink", e.is_symlink},
                             {"encrypted", e.encrypted},
                             {"method", e.method},
                             {"compressed_size", e.compressed_size},
                             {"uncompressed_size", e.uncompressed_size},
                             {"crc32", e.crc32}});
        }
        auto fs_json = ojson::array();
        for (const auto& f : findings) fs_json.push_back(finding_json(f));
        out << dump({{"path", a.path}, {"entries", entries}, {"findings", fs_json}}) << "\n";
      } else {
        for (const auto& e : listing) {
          std::string flags;
          if (e.is_dir) flags += " dir";
          if (e.is_symlink) flags += " symlink";
          if (e.encrypted) flags += " encrypted";
          if (e.escapes()) flags += " escapes";
          out << e.uncompressed_size << "\t" << e.method << "\t" << e.raw_name << (flags.empty() ? "" : "\t[") << flags
              << (flags.empty() ? "" : " ]") << "\n";
        }
        for (const auto& f : findings) out << finding_text(f) << "\n";
      }
      return findings.empty() ? kExitOk : kExitFindings;
    }

    const auto mode = a.lenient ? ExtractMode::Lenient : ExtractMode::Strict;
    ExtractResult result;
    bool refused = false;
    try {
      result = safe_extract(bytes, a.extract, mode);
    } catch (const TraversalRefused& e) {
      refused = true;
      result.findings.push_back(Finding::at(RuleId::Traversal, e.what(), std::nullopt, "CVE-2017-8314"));
    }
    if (a.json) {
      auto fs_json = ojson::array();
      for (const auto& f : result.findings) fs_json.push_back(finding_json(f));
      out << dump({{"path", a.path},
                   {"mode", mode == ExtractMode::Strict ? "strict" : "lenient"},
                   {"dest", a.extract},
                   {"refused", refused},
                   {"written", result.written},
                   {"findings", fs_json}})
          << "\n";
    } else {
      for (const auto& w : result.written) out << w << "\n";
      for (const auto& f : result.findings) err << a.path << ": " << finding_text(f) << "\n";
    }
    return result.findings.empty() ? kExitOk : kExitFindings;
  } catch (const NotAZip& e) {
    throw Exit{kExitUnparseable, a.path + ": " + e.what()};
  } catch (const CorruptCentralDirectory& e) {
    throw Exit{kExitUnparseable, a.path + ": " + e.what()};
  } catch (const IoFailure& e) {
    throw Exit{kExitUnparseable, a.path + ": " + e.what()};
  }
}

// --- fuzz ---------------------------------------------------------------

struct FuzzArgs {
  std::string format;
  std::string corpus;
  std::uint64_t iterations = 100000;
  std::string seed = "0";
  std::vector<std::string> operators;
  std::uint64_t time_budget_ms = 200;
  std::size_t max_input_bytes = 1 << 20;
  ParseLimits limits;
  bool minimize = false;
  bool json = false;
};

int cmd_fuzz(const FuzzArgs& a, std::ostream& out, std::ostream& err) {
  const auto format = format_from_name(a.format);
  if (!format || !has_parser(*format)) throw Exit{kExitUsage, "no parser for format " + a.format};
  MutationConfig config;
  config.iterations = a.iterations;
  config.seed = parse_seed(a.seed);
  config.time_budget_ms = a.time_budget_ms;
  config.max_input_bytes = a.max_input_bytes;
  config.limits = a.limits;
  if (!a.operators.empty()) {
    config.operators.clear();
    for (const auto& name : a.operators) {
      const auto op = mutation_op_from_name(name);
      if (!op) throw Exit{kExitUsage, "unknown mutation operator " + name};
      config.operators.push_back(*op);
    }
  }
  std::vector<std::string> seeds;
  FuzzOutcome outcome;
  try {
    check_limits(config.limits);
    config.validate();
    seeds = load_corpus(a.corpus);
    outcome = fuzz_seeds(*format, seeds, config);
  } catch (const EmptyCorpus& e) {
    throw Exit{kExitUsage, e.what()};
  } catch (const std::invalid_argument& e) {
    throw Exit{kExitUsage, e.what()};
  }

  std::vector<std::string> minimized;
  if (a.minimize) {
    for (const auto& f : outcome.failures) {
      const auto input = replay(seeds[f.seed_file], f.trace, config.max_input_bytes);
      try {
        minimized.push_back(subguard::minimize(input, *format, config));
      } catch (const NotReproducible&) {
        minimized.push_back(input);
      }
    }
  }

  if (a.json) {
    auto j = ojson::parse(outcome.to_json());
    if (a.minimize) {
      for (std::size_t i = 0; i < minimized.size(); ++i) j["failures"][i]["minimized"] = minimized[i];
    }
    out << dump(j) << "\n";
  } else {
    out << format_name(outcome.format) << ": " << outcome.total_cases << " cases, " << outcome.failures.size()
        << " failures\n";
    for (std::size_t i = 0; i < outcome.failures.size(); ++i) {
      const auto& f = outcome.failures[i];
      out << "  case " << f.case_index << " seed " << f.seed << " file " << f.seed_file << " "
          << failure_kind_name(f.kind) << ": " << f.detail << "\n";
      if (i < minimized.size()) out << "    minimized: " << ojson(minimized[i]).dump(-1, ' ', false, ojson::error_handler_t::replace) << "\n";
    }
    for (const auto& [code, n] : outcome.warning_counts) out << "  " << warning_name(code) << " " << n << "\n";
  }
  if (!outcome.failures.empty()) {
    err << outcome.failures.size() << " failing case(s)\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subtitle format detection, conversion and threat scanning", "subguard"};
  app.require_subcommand(1);
  const std::vector<std::string> policies{"none", "partial", "strict"};

  DetectArgs detect;
  auto* c_detect = app.add_subcommand("detect", "Identify the subtitle format of each file");
  c_detect->add_option("paths", detect.paths, "Input files")->required();
  c_detect->add_option("--probe-lines", detect.probe_lines, "Lines examined per file")->capture_default_str();
  c_detect->add_flag("--json", detect.json, "One JSON object per file");

  ConvertArgs conv;
  auto* c_convert = app.add_subcommand("convert", "Convert a subtitle file to canonical SRT");
  c_convert->add_option("path", conv.path, "Input file")->required();
  c_convert->add_option("--to", conv.to, "Target format")->check(CLI::IsMember({"srt"}))->capture_default_str();
  c_convert->add_option("-o,--output", conv.output, "Write SRT here instead of stdout");
  add_limit_options(c_convert, conv.limits);
  c_convert->add_flag("--json", conv.json, "Emit a JSON object");

  ScanArgs scan;
  auto* c_scan = app.add_subcommand("scan", "Scan subtitle files, archives and directories for threats");
  c_scan->add_option("paths", scan.paths, "Files or directories")->required();
  c_scan->add_option("--policy", scan.policy, "Sanitizer policy applied before scanning")
      ->check(CLI::IsMember(policies))
      ->capture_default_str();
  add_limit_options(c_scan, scan.limits);
  c_scan->add_flag("--json", scan.json, "One JSON report per line");

  RankArgs rank;
  auto* c_rank = app.add_subcommand("rank", "Score a subtitle repository for one movie");
  c_rank->add_option("--repo", rank.repo, "JSON-lines manifest")->required();
  c_rank->add_option("--imdb", rank.imdb, "IMDb id of the movie")->required();
  c_rank->add_option("--movie", rank.movie, "Movie file name for tag matching");
  c_rank->add_option("--config", rank.config, "Scoring config JSON");
  c_rank->add_flag("--json", rank.json, "Emit a JSON array");

  SanitizeArgs san;
  auto* c_sanitize = app.add_subcommand("sanitize", "Sanitize markup and print SRT");
  c_sanitize->add_option("path", san.path, "Input file")->required();
  c_sanitize->add_option("--policy", san.policy, "Sanitizer policy")
      ->check(CLI::IsMember(policies))
      ->capture_default_str();
  add_limit_options(c_sanitize, san.limits);
  c_sanitize->add_flag("--json", san.json, "Emit a JSON object");

  ZipArgs zip;
  auto* c_zip = app.add_subcommand("zipcheck", "List a zip archive or extract it safely");
  c_zip->add_option("path", zip.path, "Zip archive")->required();
  c_zip->add_option("--extract", zip.extract, "Extract into this directory");
  auto* f_strict = c_zip->add_flag("--strict", zip.strict, "Refuse the archive if any entry escapes (default)");
  auto* f_lenient = c_zip->add_flag("--lenient", zip.lenient, "Skip escaping entries");
  f_strict->excludes(f_lenient);
  c_zip->add_flag("--json", zip.json, "Emit a JSON object");

  FuzzArgs fuzz;
  auto* c_fuzz = app.add_subcommand("fuzz", "Mutation-fuzz one parser over a seed corpus");
  c_fuzz->add_option("--format", fuzz.format, "srt, jacosub, microdvd or sami")->required();
  c_fuzz->add_option("--corpus", fuzz.corpus, "Directory of seed files")->required();
  c_fuzz->add_option("--iterations", fuzz.iterations, "Mutated cases to run")->capture_default_str();
  c_fuzz->add_option("--seed", fuzz.seed, "Run seed, decimal or 0x hex")->capture_default_str();
  c_fuzz->add_option("--operators", fuzz.operators, "Comma-separated mutation operators")->delimiter(',');
  c_fuzz->add_option("--time-budget-ms", fuzz.time_budget_ms, "Wall-clock budget per case")->capture_default_str();
  c_fuzz->add_option("--max-input-bytes", fuzz.max_input_bytes, "Mutated input size cap")->capture_default_str();
  add_limit_options(c_fuzz, fuzz.limits);
  c_fuzz->add_flag("--minimize", fuzz.minimize, "Minimize every failing input");
  c_fuzz->add_flag("--json", fuzz.json, "Emit the outcome as JSON");

  RankArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Serve GET /search over a repository manifest");
  c_serve->add_option("--repo", serve.repo, "JSON-lines manifest")->required();
  c_serve->add_option("--bind", serve.bind, "host:port")->capture_default_str();
  c_serve->add_option("--config", serve.config, "Scoring config JSON");
  c_serve->add_flag("--json", serve.json, "Announce the listener as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_detect->parsed()) return cmd_detect(detect, out, err);
    if (c_convert->parsed()) return cmd_convert(conv, out, err);
    if (c_scan->parsed()) return cmd_scan(scan, out, err);
    if (c_rank->parsed()) return cmd_rank(rank, out, err);
    if (c_sanitize->parsed()) return cmd_sanitize(san, out, err);
    if (c_zip->parsed()) return cmd_zipcheck(zip, out, err);
    if (c_fuzz->parsed()) return cmd_fuzz(fuzz, out, err);
    if (c_serve->parsed()) return cmd_serve(serve, out, err);
  } catch (const Exit& e) {
    err << "subguard: " << e.message << "\n";
    return e.code;
  } catch (const InvariantViolation& e) {
    err << "subguard: invariant violated: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "subguard: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace subguard
