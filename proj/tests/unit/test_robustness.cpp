#include <doctest.h>

#include <json.hpp>
#include <set>

#include "corpus.hpp"
#include "gen.hpp"
#include "subguard/error.hpp"
#include "subguard/robustness.hpp"

using namespace subguard;

namespace {

std::string fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

MutationConfig small(std::uint64_t iterations, std::uint64_t seed = 7) {
  MutationConfig c;
  c.iterations = iterations;
  c.seed = seed;
  c.time_budget_ms = 5000;
  return c;
}

const std::vector<std::pair<FormatId, const char*>> kFormats = {
    {FormatId::Srt, "srt"}, {FormatId::JacoSub, "jacosub"}, {FormatId::MicroDvd, "microdvd"}, {FormatId::Sami, "sami"}};

}  // namespace

TEST_CASE("mutation operator names round trip") {
  std::set<std::string_view> names;
  for (auto op : kAllMutationOps) {
    names.insert(mutation_op_name(op));
    CHECK(mutation_op_from_name(mutation_op_name(op)) == op);
  }
  CHECK(names.size() == std::size(kAllMutationOps));
  CHECK_FALSE(mutation_op_from_name("flip").has_value());
}

TEST_CASE("config validation") {
  auto c = small(0);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small(1);
  c.operators.clear();
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small(1);
  c.limits.max_cues = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(fuzz_seeds(FormatId::SsaAss, {"x"}, small(1)), std::invalid_argument);
  CHECK_THROWS_AS(fuzz_seeds(FormatId::Srt, {}, small(1)), EmptyCorpus);
}

TEST_CASE("corpus loading") {
  const auto empty = testing::scratch_dir("empty_corpus");
  CHECK_THROWS_AS(load_corpus(empty), EmptyCorpus);
  CHECK_THROWS_AS(load_corpus(empty / "missing"), EmptyCorpus);
  CHECK_THROWS_AS(fuzz_parser(FormatId::Srt, empty, small(1)), EmptyCorpus);
  const auto seeds = load_corpus(testing::corpus_dir() / "fuzz/srt");
  CHECK(seeds.size() == testing::corpus_files("fuzz/srt").size());
  CHECK(seeds[0] == testing::read_file(testing::corpus_files("fuzz/srt")[0]));
}

TEST_CASE("mutations respect the size cap and replay exactly") {
  testing::Gen g(5);
  for (int i = 0; i < 3000; ++i) {
    const auto input = g.bytes(200);
    const auto cap = static_cast<std::size_t>(g.range(1, 300));
    std::vector<MutationStep> trace;
    for (int k = g.range(1, 4); k > 0; --k) {
      trace.push_back({g.pick(std::vector<MutationOp>(std::begin(kAllMutationOps), std::end(kAllMutationOps))),
                       g.u64(), g.u64(), g.u64()});
    }
    const auto a = replay(input, trace, cap);
    REQUIRE(a.size() <= cap);
    REQUIRE(a == replay(input, trace, cap));
    // Oversized seeds are cut to the cap before the first step.
    std::string b = input.substr(0, cap);
    for (const auto& s : trace) b = apply_mutation(b, s, cap);
    REQUIRE(a == b);
  }
}

TEST_CASE("case traces are deterministic in seed and index") {
  const auto ops = small(1).operators;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto s = case_seed(0xC0FFEE, i);
    CHECK(s == case_seed(0xC0FFEE, i));
    std::size_t f1 = 0, f2 = 0;
    const auto t1 = case_trace(s, ops, f1, 5);
    const auto t2 = case_trace(s, ops, f2, 5);
    CHECK(f1 == f2);
    CHECK(f1 < 5);
    REQUIRE(t1.size() == t2.size());
    for (std::size_t k = 0; k < t1.size(); ++k) {
      CHECK(t1[k].op == t2[k].op);
      CHECK(t1[k].a == t2[k].a);
    }
  }
  CHECK(case_seed(1, 0) != case_seed(2, 0));
}

TEST_CASE("same seed, same outcome") {
  const auto seeds = load_corpus(testing::corpus_dir() / "fuzz/srt");
  const auto a = fuzz_seeds(FormatId::Srt, seeds, small(500));
  const auto b = fuzz_seeds(FormatId::Srt, seeds, small(500));
  CHECK(a.total_cases == 500);
  CHECK(a.warning_counts == b.warning_counts);
  // to_json carries only deterministic fields.
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_json() != fuzz_seeds(FormatId::Srt, seeds, small(500, 8)).to_json());
}

TEST_CASE("a planted bug is found, replayed and minimized") {
  const auto seeds = load_corpus(testing::corpus_dir() / "fuzz/srt");
  auto cfg = small(2000);
  const auto planted = [](std::string_view in) {
    if (in.find("<<") != std::string_view::npos) throw std::runtime_error("planted");
  };
  cfg.extra_check = planted;
  const auto out = fuzz_seeds(FormatId::Srt, seeds, cfg);
  REQUIRE_FALSE(out.failures.empty());
  for (std::size_t i = 1; i < out.failures.size(); ++i) {
    CHECK(out.failures[i - 1].case_index < out.failures[i].case_index);
  }
  const auto& f = out.failures.front();
  CHECK(f.kind == FailureKind::Abort);
  CHECK(f.detail == "planted");
  CHECK(f.seed == case_seed(cfg.seed, f.case_index));
  const auto input = replay(seeds[f.seed_file], f.trace, cfg.max_input_bytes);
  CHECK(fnv1a(input) == f.input_digest);
  CHECK(run_case(FormatId::Srt, input, cfg).failure == FailureKind::Abort);

  const auto min = minimize(input, FormatId::Srt, cfg);
  CHECK(min == "<<");
  const auto j = nlohmann::json::parse(out.to_json());
  CHECK(j["failures"].size() == out.failures.size());
  CHECK(j["failures"][0]["kind"] == "Abort");
}

TEST_CASE("minimize") {
  const auto fails = [](std::string_view s) {
    return s.find('x') != std::string_view::npos && s.find('y') != std::string_view::npos;
  };
  CHECK(minimize("aaaaxbbbbbbbbybbbb", fails) == "xy");
  CHECK_THROWS_AS(minimize("abc", fails), NotReproducible);
  CHECK_THROWS_AS(minimize("hello", FormatId::Srt, small(1)), NotReproducible);
  testing::Gen g(9);
  for (int i = 0; i < 300; ++i) {
    auto s = g.bytes(60) + "x" + g.bytes(60) + "y" + g.bytes(20);
    const auto m = minimize(s, fails);
    REQUIRE(fails(m));
    REQUIRE(m.size() == 2);
  }
}

TEST_CASE("clean runs over every fuzz corpus") {
  std::set<WarningCode> seen;
  for (const auto& [fmt, dir] : kFormats) {
    CAPTURE(dir);
    const auto out = fuzz_parser(fmt, testing::corpus_dir() / "fuzz" / dir, small(3000, 0xC0FFEE));
    CHECK(out.failures.empty());
    CHECK(out.total_cases == 3000);
    for (const auto& [code, n] : out.warning_counts) {
      if (n) seen.insert(code);
    }
  }
  // Every warning the parsers can emit shows up under mutation.
  for (auto code : kAllWarningCodes) {
    CAPTURE(warning_name(code));
    CHECK(seen.count(code) == 1);
  }
}

TEST_CASE("limits are honoured under mutation") {
  auto cfg = small(1000, 3);
  cfg.limits.max_line_bytes = 64;
  cfg.limits.max_cues = 4;
  cfg.limits.max_span_depth = 2;
  for (const auto& [fmt, dir] : kFormats) {
    CAPTURE(dir);
    CHECK(fuzz_parser(fmt, testing::corpus_dir() / "fuzz" / dir, cfg).failures.empty());
  }
}
