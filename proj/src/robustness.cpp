#include "subguard/robustness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "subguard/cursor.hpp"
#include "subguard/error.hpp"
#include "subguard/parsers.hpp"
#include "subguard/text.hpp"

namespace subguard {

namespace {

// Snippets that land on the constructs the parsers are most careful about.
constexpr std::string_view kDirectiveSnippets[] = {
    "#S",         "#SH",         "#SHIFT",      "#SHIFT 99999:00:00.00 ", "#S -5",
    "#T",         "#TIMERES 0",  "#TIMERES",    "#TIMERES 30 ",           "@100 @200 ",
    "CF{x}",      "VT",          "[",           "0:00:01.00 0:00:02.00 ", "0:00:01.00 0:00:02.00 RLB",
    "{0}{0}",     "{1}{1}25",    "{y:i}",       "{Y:b}",                  "{c:$0000FF}",
    "{q:1}",      "{10}{5}",     "<SYNC Start=", "<SYNC Start=10>",       "<SYNC>",
    "99:59:59,999 --> 00:00:00,000\n",           "1\n",                   "\xEF\xBB\xBF",
};

constexpr std::string_view kUncloseSnippets[] = {
    "<font color=\"", "<b", "<img src=", "</", "<i><i><i><i><i><i><i><i><i><i><i><i><i><i><i><i><i>",
    "<b a=1 a=2>",    "<a href='", "<!--",
};

constexpr std::string_view kDangleSnippets[] = {
    "\\", "\\C", "\\F", "\\c", "\\\r", "&#", "&#x10FFFF", "&", "\\N\\", "{",
};

std::size_t line_start(const std::string& s, std::uint64_t pick) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n') starts.push_back(i + 1);
  }
  return starts[pick % starts.size()];
}

std::size_t line_end(const std::string& s, std::uint64_t pick) {
  const auto start = line_start(s, pick);
  auto end = s.find('\n', start);
  if (end == std::string::npos) end = s.size();
  while (end > start && s[end - 1] == '\r') --end;
  return end;
}

std::uint64_t splitmix(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string check_document(FormatId format, std::string_view input, const SubtitleDocument& doc,
                           const ParseLimits& limits, bool& limit_violation) {
  limit_violation = false;
  if (doc.cues.size() > limits.max_cues) {
    limit_violation = true;
    return "cue count exceeds max_cues";
  }
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < doc.cues.size(); ++i) {
    const auto& cue = doc.cues[i];
    if (cue.start > cue.end) return "cue " + std::to_string(i) + " ends before it starts";
    if (i > 0 && doc.cues[i - 1].start > cue.start) return "cues are not sorted by start";
    if (cue.start.millis() < 0) return "negative start time";
    const auto off = cue.raw_location.byte_offset;
    if (off > input.size() || cue.raw_text.size() > input.size() - off) return "raw span out of bounds";
    if (input.substr(off, cue.raw_text.size()) != cue.raw_text) return "raw_text differs from the source span";
    spans.emplace_back(off, off + cue.raw_text.size());
    if (element_depth(cue.content) > limits.max_span_depth + 1) {
      limit_violation = true;
      return "markup nesting exceeds max_span_depth";
    }
    if (flatten(cue.content) != plain_projection(format, cue.raw_text)) {
      return "plain projection disagrees with the markup tree in cue " + std::to_string(i);
    }
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) return "raw spans overlap";
  }
  for (const auto& w : doc.warnings) {
    if (w.location.byte_offset > input.size()) return "warning located past the end of input";
  }
  return {};
}

}  // namespace

std::string_view mutation_op_name(MutationOp op) noexcept {
  switch (op) {
    case MutationOp::BitFlip: return "bit_flip";
    case MutationOp::ByteSplice: return "byte_splice";
    case MutationOp::TokenDuplicate: return "token_duplicate";
    case MutationOp::Truncate: return "truncate";
    case MutationOp::DirectiveInject: return "directive_inject";
    case MutationOp::TagUnclose: return "tag_unclose";
    case MutationOp::EscapeDangle: return "escape_dangle";
  }
  return "bit_flip";
}

std::optional<MutationOp> mutation_op_from_name(std::string_view name) noexcept {
  for (auto op : kAllMutationOps) {
    if (mutation_op_name(op) == name) return op;
  }
  return std::nullopt;
}

std::string_view failure_kind_name(FailureKind k) noexcept {
  switch (k) {
    case FailureKind::Abort: return "Abort";
    case FailureKind::Timeout: return "Timeout";
    case FailureKind::LimitViolation: return "LimitViolation";
    case FailureKind::InvariantViolation: return "InvariantViolation";
  }
  return "Abort";
}

void MutationConfig::validate() const {
  if (iterations == 0) throw std::invalid_argument("iterations must be at least 1");
  if (operators.empty()) throw std::invalid_argument("at least one mutation operator is required");
  if (max_input_bytes == 0) throw std::invalid_argument("max_input_bytes must be positive");
  limits.validate();
}

std::string apply_mutation(std::string s, const MutationStep& step, std::size_t max_bytes) {
  const std::size_t n = s.size();
  auto insert = [&](std::size_t at, std::string_view what) { s.insert(std::min(at, s.size()), what); };
  switch (step.op) {
    case MutationOp::BitFlip:
      if (n == 0) {
        s.push_back(static_cast<char>(step.b & 0xFF));
      } else {
        s[step.a % n] = static_cast<char>(s[step.a % n] ^ (1u << (step.b % 8)));
      }
      break;
    case MutationOp::ByteSplice: {
      if (n == 0) {
        s.push_back(static_cast<char>(step.c & 0xFF));
        break;
      }
      const std::size_t from = step.a % n;
      const std::size_t len = 1 + step.b % std::min<std::size_t>(n - from, 64);
      const std::string chunk = s.substr(from, len);
      if (step.c & 1) {
        // Overwrite in place.
        const std::size_t to = (step.c >> 1) % n;
        s.replace(to, std::min(len, n - to), chunk);
      } else {
        insert((step.c >> 1) % (n + 1), chunk);
      }
      break;
    }
    case MutationOp::TokenDuplicate: {
      if (n == 0) break;
      // Duplicate the line or the blank-delimited token around a position.
      const std::size_t at = step.a % n;
      const bool whole_line = step.b & 1;
      auto stop = [whole_line](char c) { return c == '\n' || (!whole_line && (c == ' ' || c == '\t')); };
      std::size_t b = at, e = at;
      while (b > 0 && !stop(s[b - 1])) --b;
      while (e < n && !stop(s[e])) ++e;
      if (whole_line && e < n) ++e;
      const std::string token = s.substr(b, e - b);
      const std::size_t copies = 1 + (step.b >> 1) % 4;
      for (std::size_t k = 0; k < copies; ++k) insert(e, token);
      break;
    }
    case MutationOp::Truncate:
      s.resize(step.a % (n + 1));
      break;
    case MutationOp::DirectiveInject: {
      const auto& snip = kDirectiveSnippets[step.b % std::size(kDirectiveSnippets)];
      insert(step.c & 1 ? line_start(s, step.a) : line_end(s, step.a), snip);
      break;
    }
    case MutationOp::TagUnclose: {
      std::vector<std::size_t> closers;
      for (std::size_t i = 0; i < n; ++i) {
        if (s[i] == '>') closers.push_back(i);
      }
      if (!closers.empty() && (step.b & 1)) {
        s.erase(closers[step.a % closers.size()], 1);
      } else {
        insert(line_end(s, step.a), kUncloseSnippets[(step.b >> 1) % std::size(kUncloseSnippets)]);
      }
      break;
    }
    case MutationOp::EscapeDangle: {
      const auto& snip = kDangleSnippets[step.b % std::size(kDangleSnippets)];
      insert(step.c & 1 ? s.size() : line_end(s, step.a), snip);
      break;
    }
  }
  if (s.size() > max_bytes) s.resize(max_bytes);
  return s;
}

std::string replay(std::string_view seed_input, const std::vector<MutationStep>& trace, std::size_t max_bytes) {
  std::string s(seed_input);
  if (s.size() > max_bytes) s.resize(max_bytes);
  for (const auto& step : trace) s = apply_mutation(std::move(s), step, max_bytes);
  return s;
}

std::uint64_t case_seed(std::uint64_t run_seed, std::uint64_t index) noexcept {
  return splitmix(splitmix(run_seed) ^ index);
}

std::vector<MutationStep> case_trace(std::uint64_t seed, const std::vector<MutationOp>& ops, std::size_t& seed_file,
                                     std::size_t seed_count) {
  std::mt19937_64 rng(seed);
  seed_file = seed_count == 0 ? 0 : static_cast<std::size_t>(rng() % seed_count);
  const std::size_t steps = 1 + static_cast<std::size_t>(rng() % 4);
  std::vector<MutationStep> trace;
  for (std::size_t i = 0; i < steps; ++i) {
    MutationStep step{ops[rng() % ops.size()]};
    step.a = rng();
    step.b = rng();
    step.c = rng();
    trace.push_back(step);
  }
  return trace;
}

CaseVerdict run_case(FormatId format, std::string_view input, const MutationConfig& config) {
  CaseVerdict v;
  const auto started = std::chrono::steady_clock::now();
  // Generous but linear: every parser touches each byte a bounded number of
  // times through its cursors.
  const std::uint64_t work_limit = 64 * (static_cast<std::uint64_t>(input.size()) + 256);
  try {
    CursorAudit audit(work_limit);
    if (config.extra_check) config.extra_check(input);
    SubtitleDocument doc;
    try {
      doc = parse_as(format, input, config.limits);
    } catch (const LimitExceeded&) {
      return v;  // the documented structured refusal
    }
    for (const auto& w : doc.warnings) v.warnings.push_back(w.code);
    bool limit_violation = false;
    auto problem = check_document(format, input, doc, config.limits, limit_violation);
    if (problem.empty()) {
      // Canonical SRT must read back as the same document.
      const auto srt = serialize_srt(doc);
      try {
        const auto again = parse_srt(srt, config.limits);
        if (!structurally_equal(doc, again)) problem = "SRT round trip changed the document";
        else if (serialize_srt(again) != srt) problem = "second serialization differs";
      } catch (const LimitExceeded&) {
        // Entity escaping may lengthen a line past the limit; that is the
        // limit doing its job, not a broken invariant.
      }
    }
    if (problem.empty() && (audit.stats().violations || audit.stats().overconsumed)) {
      problem = "cursor attempted to read past the end of its buffer";
    }
    if (!problem.empty()) {
      v.failure = limit_violation ? FailureKind::LimitViolation : FailureKind::InvariantViolation;
      v.detail = problem;
      return v;
    }
  } catch (const WorkBoundExceeded& e) {
    v.failure = FailureKind::Timeout;
    v.detail = e.what();
    return v;
  } catch (const InvariantViolation& e) {
    v.failure = FailureKind::InvariantViolation;
    v.detail = e.what();
    return v;
  } catch (const std::exception& e) {
    v.failure = FailureKind::Abort;
    v.detail = e.what();
    return v;
  }
  const auto elapsed = std::chrono::steady_clock::now() - started;
  if (std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() >
      static_cast<std::int64_t>(config.time_budget_ms)) {
    v.failure = FailureKind::Timeout;
    v.detail = "case exceeded the time budget";
  }
  return v;
}

FuzzOutcome fuzz_seeds(FormatId format, const std::vector<std::string>& seeds, const MutationConfig& config) {
  config.validate();
  if (!has_parser(format)) throw std::invalid_argument("format has no parser: " + std::string(format_name(format)));
  if (seeds.empty()) throw EmptyCorpus("no seed inputs");
  FuzzOutcome out;
  out.format = format;
  out.config = config;
  for (std::uint64_t i = 0; i < config.iterations; ++i) {
    const auto seed = case_seed(config.seed, i);
    std::size_t seed_file = 0;
    auto trace = case_trace(seed, config.operators, seed_file, seeds.size());
    const auto input = replay(seeds[seed_file], trace, config.max_input_bytes);
    auto verdict = run_case(format, input, config);
    ++out.total_cases;
    for (auto code : verdict.warnings) ++out.warning_counts[code];
    if (verdict.failure) {
      out.failures.push_back(
          {i, seed, seed_file, std::move(trace), text::fnv1a_hex(input), *verdict.failure, verdict.detail});
    }
  }
  return out;
}

std::vector<std::string> load_corpus(const std::filesystem::path& corpus_dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (std::filesystem::directory_iterator it(corpus_dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file()) files.push_back(it->path());
  }
  if (ec) throw EmptyCorpus("cannot read corpus directory " + corpus_dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<std::string> seeds;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    seeds.push_back(ss.str());
  }
  if (seeds.empty()) throw EmptyCorpus("corpus directory " + corpus_dir.string() + " holds no files");
  return seeds;
}

FuzzOutcome fuzz_parser(FormatId format, const std::filesystem::path& corpus_dir, const MutationConfig& config) {
  config.validate();
  return fuzz_seeds(format, load_corpus(corpus_dir), config);
}

std::string FuzzOutcome::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  cfg["format"] = format_name(format);
  cfg["iterations"] = config.iterations;
  cfg["max_input_bytes"] = config.max_input_bytes;
  cfg["time_budget_ms_per_case"] = config.time_budget_ms;
  cfg["seed"] = config.seed;
  auto ops = nlohmann::ordered_json::array();
  for (auto op : config.operators) ops.push_back(mutation_op_name(op));
  cfg["operators"] = ops;
  j["config"] = cfg;
  j["total_cases"] = total_cases;
  auto fails = nlohmann::ordered_json::array();
  for (const auto& f : failures) {
    nlohmann::ordered_json o;
    o["case_index"] = f.case_index;
    o["seed"] = f.seed;
    o["seed_file"] = f.seed_file;
    auto trace = nlohmann::ordered_json::array();
    for (const auto& s : f.trace) {
      trace.push_back({{"op", mutation_op_name(s.op)}, {"a", s.a}, {"b", s.b}, {"c", s.c}});
    }
    o["trace"] = trace;
    o["input_digest"] = f.input_digest;
    o["kind"] = failure_kind_name(f.kind);
    o["detail"] = f.detail;
    fails.push_back(std::move(o));
  }
  j["failures"] = fails;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [code, n] : warning_counts) counts[std::string(warning_name(code))] = n;
  j["warning_counts"] = counts;
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

std::string minimize(std::string input, const std::function<bool(std::string_view)>& fails) {
  if (!fails(input)) throw NotReproducible("input does not fail");
  if (fails("")) return {};
  std::size_t parts = 2;
  while (input.size() >= 2) {
    const std::size_t chunk = (input.size() + parts - 1) / parts;
    bool reduced = false;
    for (std::size_t start = 0; start < input.size(); start += chunk) {
      std::string candidate = input.substr(0, start) + input.substr(std::min(input.size(), start + chunk));
      if (fails(candidate)) {
        input = std::move(candidate);
        parts = std::max<std::size_t>(parts - 1, 2);
        reduced = true;
        break;
      }
    }
    if (reduced) continue;
    if (parts >= input.size()) break;
    parts = std::min(input.size(), parts * 2);
  }
  // Final pass: no single byte can go.
  for (std::size_t i = 0; i < input.size();) {
    std::string candidate = input;
    candidate.erase(i, 1);
    if (fails(candidate)) {
      input = std::move(candidate);
      i = 0;
    } else {
      ++i;
    }
  }
  return input;
}

std::string minimize(std::string input, FormatId format, const MutationConfig& config) {
  return minimize(std::move(input),
                  [&](std::string_view s) { return run_case(format, s, config).failure.has_value(); });
}

}  // namespace subguard
