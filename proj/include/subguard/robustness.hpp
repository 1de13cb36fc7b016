#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subguard/limits.hpp"
#include "subguard/model.hpp"

namespace subguard {

enum class MutationOp { BitFlip, ByteSplice, TokenDuplicate, Truncate, DirectiveInject, TagUnclose, EscapeDangle };

inline constexpr MutationOp kAllMutationOps[] = {
    MutationOp::BitFlip,         MutationOp::ByteSplice, MutationOp::TokenDuplicate, MutationOp::Truncate,
    MutationOp::DirectiveInject, MutationOp::TagUnclose, MutationOp::EscapeDangle,
};

std::string_view mutation_op_name(MutationOp op) noexcept;
std::optional<MutationOp> mutation_op_from_name(std::string_view name) noexcept;

struct MutationConfig {
  std::uint64_t iterations = 100000;
  std::size_t max_input_bytes = 1 << 20;
  std::uint64_t time_budget_ms = 200;
  std::uint64_t seed = 0;
  std::vector<MutationOp> operators{std::begin(kAllMutationOps), std::end(kAllMutationOps)};
  ParseLimits limits;
  /// Extra per-case check run on the mutated input before parsing; it
  /// signals a failure by throwing. Lets tests plant a synthetic bug.
  std::function<void(std::string_view)> extra_check;

  /// Throws std::invalid_argument for zero iterations or no operators.
  void validate() const;
};

/// One applied mutation. Parameters are raw random words reduced modulo the
/// buffer at application time, so a trace replays exactly.
struct MutationStep {
  MutationOp op;
  std::uint64_t a = 0, b = 0, c = 0;
};

enum class FailureKind { Abort, Timeout, LimitViolation, InvariantViolation };
std::string_view failure_kind_name(FailureKind k) noexcept;

struct FailureRecord {
  std::uint64_t case_index = 0;
  std::uint64_t seed = 0;  // per-case seed
  std::size_t seed_file = 0;
  std::vector<MutationStep> trace;
  std::string input_digest;  // FNV-1a of the mutated input
  FailureKind kind = FailureKind::Abort;
  std::string detail;
};

struct FuzzOutcome {
  FormatId format = FormatId::Unknown;
  MutationConfig config;
  std::uint64_t total_cases = 0;
  std::vector<FailureRecord> failures;  // ordered by case index
  std::map<WarningCode, std::uint64_t> warning_counts;

  std::string to_json() const;
};

struct CaseVerdict {
  std::optional<FailureKind> failure;
  std::string detail;
  std::vector<WarningCode> warnings;
};

/// Parses one input under the audited cursor and checks every document
/// invariant: ordering, start <= end, raw spans in bounds and disjoint,
/// plain/markup agreement, limits, SRT round trip, no out-of-bounds cursor
/// access, work bound and time budget.
CaseVerdict run_case(FormatId format, std::string_view input, const MutationConfig& config);

std::string apply_mutation(std::string input, const MutationStep& step, std::size_t max_bytes);
std::string replay(std::string_view seed_input, const std::vector<MutationStep>& trace, std::size_t max_bytes);

/// Per-case seed and trace for case `index`, deterministic in (config.seed, index).
std::uint64_t case_seed(std::uint64_t run_seed, std::uint64_t index) noexcept;
std::vector<MutationStep> case_trace(std::uint64_t seed, const std::vector<MutationOp>& ops, std::size_t& seed_file,
                                     std::size_t seed_count);

FuzzOutcome fuzz_seeds(FormatId format, const std::vector<std::string>& seeds, const MutationConfig& config);

/// Contents of every regular file of corpus_dir, sorted by name. Throws
/// EmptyCorpus when there is none or the directory cannot be read.
std::vector<std::string> load_corpus(const std::filesystem::path& corpus_dir);

/// fuzz_seeds over load_corpus(corpus_dir). Throws std::invalid_argument
/// when the format has no parser or the config is invalid.
FuzzOutcome fuzz_parser(FormatId format, const std::filesystem::path& corpus_dir, const MutationConfig& config);

/// Greedy chunk-removal delta debugging followed by a single-byte removal
/// pass. Throws NotReproducible when `fails(input)` is false.
std::string minimize(std::string input, const std::function<bool(std::string_view)>& fails);
std::string minimize(std::string input, FormatId format, const MutationConfig& config);

}  // namespace subguard
