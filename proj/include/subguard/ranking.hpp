#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subguard {

/// Scores are exact; 2/6 x 7 stays 7/3 until it is printed.
using Score = boost::rational<std::int64_t>;

/// Three decimals, rounded half away from zero: 7/3 -> "2.333".
std::string format_score(const Score& s);

enum class UploaderRank { Anonymous, Member, Gold };
std::string_view rank_name(UploaderRank r) noexcept;

constexpr std::uint64_t kGoldUploads = 101;

/// Gold iff upload_count >= 101, else Member iff registered, else Anonymous.
UploaderRank rank_of(bool registered, std::uint64_t upload_count) noexcept;

struct UploaderProfile {
  std::string name;
  bool registered = false;
  std::uint64_t upload_count = 0;
  UploaderRank rank() const noexcept { return rank_of(registered, upload_count); }
};

struct RepoEntry {
  std::string subtitle_filename;
  std::string imdb_id;  // digits only
  std::string language;
  UploaderProfile uploader;
  std::optional<std::string> payload_path;
};

struct ScoringConfig {
  Score imdb_match_points{5};
  Score tag_max_score{7};
  std::map<UploaderRank, Score> rank_bonus{
      {UploaderRank::Anonymous, Score(0)}, {UploaderRank::Member, Score(1)}, {UploaderRank::Gold, Score(3)}};

  Score bonus(UploaderRank r) const;

  /// {"imdb_match_points", "tag_max_score", "rank_bonus": {"anonymous",
  /// "member", "gold"}}; absent keys keep their defaults. Throws
  /// std::invalid_argument on negative or non-numeric values.
  static ScoringConfig from_json(std::string_view json);
  static ScoringConfig load(const std::filesystem::path& path);
};

struct ScoreBreakdown {
  Score imdb_points{0};
  Score tag_points{0};
  Score rank_points{0};
  Score total() const { return imdb_points + tag_points + rank_points; }
};

/// Splits on '.', '-', '[', ']', '_' and whitespace; empty tokens dropped.
std::vector<std::string> tokenize_tags(std::string_view filename);

/// True when `token` is a known video or subtitle file extension.
bool is_extension_tag(std::string_view token);

/// |M intersect S| / |M| x tag_max_score, where M and S are the
/// case-insensitive tag sets of the two names with a trailing extension tag
/// removed. Throws EmptyMovieTags when M is empty.
Score match_tags(std::string_view movie_filename, std::string_view subtitle_filename,
                 const ScoringConfig& config = {});

ScoreBreakdown score(const RepoEntry& entry, std::string_view query_imdb,
                     const std::optional<std::string>& movie_filename, const ScoringConfig& config = {});

struct ScoredResult {
  RepoEntry entry;
  ScoreBreakdown breakdown;
  std::size_t ingestion_index = 0;
};

/// Subtitle repository. Upload counts of registered uploaders are aggregated
/// across all rows: each uploader's count is the larger of the declared
/// maximum and the number of rows carrying that name.
class RepoStore {
 public:
  /// Loads a JSON-lines manifest. Throws ManifestUnreadable when the file
  /// cannot be read and ManifestSyntax for a line that is not JSON; rows with
  /// missing or ill-typed fields are skipped and recorded in warnings().
  std::size_t ingest(const std::filesystem::path& manifest);
  std::size_t ingest(std::istream& in, std::string_view origin = "<stream>");
  void add(RepoEntry entry);

  const std::vector<RepoEntry>& entries() const noexcept { return entries_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Entries whose imdb_id matches (a leading "tt" in the query is ignored),
  /// best total first, ties in ingestion order.
  std::vector<ScoredResult> search(std::string_view query_imdb, const std::optional<std::string>& movie_filename,
                                   const ScoringConfig& config = {}) const;

 private:
  void refresh_upload_counts();

  std::vector<RepoEntry> entries_;
  std::vector<std::uint64_t> declared_counts_;
  std::vector<std::string> warnings_;
};

/// JSON array of results, one object per row, scores as 3-decimal strings.
std::string results_to_json(const std::vector<ScoredResult>& results);
std::string results_to_table(const std::vector<ScoredResult>& results);

/// GET /search handler without the HTTP layer: returns (status, body).
/// Missing or non-numeric imdbid, or a movie name without tags, is a 400.
std::pair<int, std::string> handle_search_query(const RepoStore& store, const ScoringConfig& config,
                                                const std::multimap<std::string, std::string>& params);

/// Serves GET /search until the process is interrupted. Returns false when
/// the address cannot be bound.
bool serve_search(const RepoStore& store, const ScoringConfig& config, const std::string& host, int port);

}  // namespace subguard
