#include "subguard/ranking.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "subguard/error.hpp"
#include "subguard/text.hpp"

namespace subguard {

namespace {

using json = nlohmann::json;

constexpr std::string_view kExtensions[] = {
    "mp4", "mkv", "avi", "mov", "wmv", "m4v", "mpg", "mpeg", "webm", "flv", "ts",
    "srt", "sub", "smi", "sami", "ssa", "ass", "jss", "js",  "txt", "vtt", "idx",
};

bool is_separator(char c) noexcept {
  return c == '.' || c == '-' || c == '[' || c == ']' || c == '_' || text::is_space(c);
}

std::set<std::string> comparable_tags(std::string_view filename) {
  auto tags = tokenize_tags(filename);
  if (!tags.empty() && is_extension_tag(tags.back())) tags.pop_back();
  std::set<std::string> out;
  for (const auto& t : tags) out.insert(text::lower(t));
  return out;
}

Score score_from_json(const json& v, const char* key) {
  if (!v.is_number()) throw std::invalid_argument(std::string(key) + " must be a number");
  Score s;
  if (v.is_number_integer()) {
    s = Score(v.get<std::int64_t>());
  } else {
    // Decimal fractions from a config file are taken to the micro-unit.
    const double d = v.get<double>();
    if (!(d > -1e12 && d < 1e12)) throw std::invalid_argument(std::string(key) + " is out of range");
    s = Score(static_cast<std::int64_t>(d * 1'000'000 + (d < 0 ? -0.5 : 0.5)), 1'000'000);
  }
  if (s < 0) throw std::invalid_argument(std::string(key) + " must not be negative");
  return s;
}

std::string_view strip_tt(std::string_view id) {
  if (id.size() > 2 && (id[0] == 't' || id[0] == 'T') && (id[1] == 't' || id[1] == 'T')) id.remove_prefix(2);
  return id;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return text::is_digit(c); });
}

}  // namespace

std::string format_score(const Score& s) {
  const __int128 num = static_cast<__int128>(s.numerator()) * 1000;
  const __int128 den = s.denominator();
  const bool neg = num < 0;
  const __int128 mag = neg ? -num : num;
  const __int128 milli = (mag * 2 + den) / (2 * den);
  const auto whole = static_cast<long long>(milli / 1000);
  const auto frac = static_cast<int>(milli % 1000);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%03d", neg && milli != 0 ? "-" : "", whole, frac);
  return buf;
}

std::string_view rank_name(UploaderRank r) noexcept {
  switch (r) {
    case UploaderRank::Anonymous: return "anonymous";
    case UploaderRank::Member: return "member";
    case UploaderRank::Gold: return "gold";
  }
  return "anonymous";
}

UploaderRank rank_of(bool registered, std::uint64_t upload_count) noexcept {
  if (upload_count >= kGoldUploads) return UploaderRank::Gold;
  return registered ? UploaderRank::Member : UploaderRank::Anonymous;
}

Score ScoringConfig::bonus(UploaderRank r) const {
  const auto it = rank_bonus.find(r);
  return it == rank_bonus.end() ? Score(0) : it->second;
}

ScoringConfig ScoringConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("scoring config is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("scoring config must be a JSON object");
  ScoringConfig c;
  if (j.contains("imdb_match_points")) c.imdb_match_points = score_from_json(j["imdb_match_points"], "imdb_match_points");
  if (j.contains("tag_max_score")) c.tag_max_score = score_from_json(j["tag_max_score"], "tag_max_score");
  if (j.contains("rank_bonus")) {
    const auto& rb = j["rank_bonus"];
    if (!rb.is_object()) throw std::invalid_argument("rank_bonus must be an object");
    const std::pair<const char*, UploaderRank> keys[] = {
        {"anonymous", UploaderRank::Anonymous}, {"member", UploaderRank::Member}, {"gold", UploaderRank::Gold}};
    for (const auto& [key, rank] : keys) {
      if (rb.contains(key)) c.rank_bonus[rank] = score_from_json(rb[key], key);
    }
  }
  return c;
}

ScoringConfig ScoringConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read scoring config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::vector<std::string> tokenize_tags(std::string_view filename) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < filename.size()) {
    while (i < filename.size() && is_separator(filename[i])) ++i;
    const std::size_t begin = i;
    while (i < filename.size() && !is_separator(filename[i])) ++i;
    if (i > begin) out.emplace_back(filename.substr(begin, i - begin));
  }
  return out;
}

bool is_extension_tag(std::string_view token) {
  const auto t = text::lower(token);
  return std::find(std::begin(kExtensions), std::end(kExtensions), t) != std::end(kExtensions);
}

Score match_tags(std::string_view movie_filename, std::string_view subtitle_filename, const ScoringConfig& config) {
  const auto movie = comparable_tags(movie_filename);
  if (movie.empty()) throw EmptyMovieTags("movie file name has no tags: '" + std::string(movie_filename) + "'");
  const auto sub = comparable_tags(subtitle_filename);
  std::int64_t shared = 0;
  for (const auto& t : movie) shared += sub.count(t) ? 1 : 0;
  return Score(shared, static_cast<std::int64_t>(movie.size())) * config.tag_max_score;
}

ScoreBreakdown score(const RepoEntry& entry, std::string_view query_imdb,
                     const std::optional<std::string>& movie_filename, const ScoringConfig& config) {
  ScoreBreakdown b;
  b.imdb_points = entry.imdb_id == strip_tt(query_imdb) ? config.imdb_match_points : Score(0);
  if (movie_filename) b.tag_points = match_tags(*movie_filename, entry.subtitle_filename, config);
  b.rank_points = config.bonus(entry.uploader.rank());
  return b;
}

std::size_t RepoStore::ingest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw ManifestUnreadable("cannot read manifest " + manifest.string());
  return ingest(in, manifest.string());
}

std::size_t RepoStore::ingest(std::istream& in, std::string_view origin) {
  std::vector<RepoEntry> rows;
  std::vector<std::uint64_t> counts;
  std::vector<std::string> warnings;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::is_blank_line(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ManifestSyntax(number, e.what());
    }
    const auto skip = [&](const std::string& why) {
      warnings.push_back(std::string(origin) + ":" + std::to_string(number) + ": " + why + "; row skipped");
    };
    if (!j.is_object()) {
      skip("row is not an object");
      continue;
    }
    const auto str = [&](const char* key, bool required, std::string& out) {
      if (!j.contains(key)) return !required;
      if (!j[key].is_string()) return false;
      out = j[key].get<std::string>();
      return true;
    };
    RepoEntry e;
    if (!str("subtitle_filename", true, e.subtitle_filename) || e.subtitle_filename.empty()) {
      skip("subtitle_filename missing or empty");
      continue;
    }
    if (!str("imdb_id", true, e.imdb_id) || !all_digits(e.imdb_id)) {
      skip("imdb_id must be a string of digits");
      continue;
    }
    if (!str("language", false, e.language) || !str("uploader_name", false, e.uploader.name)) {
      skip("language and uploader_name must be strings");
      continue;
    }
    if (j.contains("uploader_registered")) {
      if (!j["uploader_registered"].is_boolean()) {
        skip("uploader_registered must be a boolean");
        continue;
      }
      e.uploader.registered = j["uploader_registered"].get<bool>();
    }
    std::uint64_t declared = 0;
    if (j.contains("uploader_upload_count")) {
      if (!j["uploader_upload_count"].is_number_unsigned()) {
        skip("uploader_upload_count must be a non-negative integer");
        continue;
      }
      declared = j["uploader_upload_count"].get<std::uint64_t>();
    }
    if (j.contains("payload_path")) {
      if (!j["payload_path"].is_string()) {
        skip("payload_path must be a string");
        continue;
      }
      e.payload_path = j["payload_path"].get<std::string>();
    }
    e.uploader.upload_count = declared;
    rows.push_back(std::move(e));
    counts.push_back(declared);
  }
  if (in.bad()) throw ManifestUnreadable("read error in " + std::string(origin));
  // A syntax error leaves the store untouched.
  for (std::size_t i = 0; i < rows.size(); ++i) {
    entries_.push_back(std::move(rows[i]));
    declared_counts_.push_back(counts[i]);
  }
  warnings_.insert(warnings_.end(), warnings.begin(), warnings.end());
  refresh_upload_counts();
  return rows.size();
}

void RepoStore::add(RepoEntry entry) {
  declared_counts_.push_back(entry.uploader.upload_count);
  entries_.push_back(std::move(entry));
  refresh_upload_counts();
}

void RepoStore::refresh_upload_counts() {
  std::map<std::string, std::uint64_t> totals;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& u = entries_[i].uploader;
    if (!u.registered || u.name.empty()) continue;
    auto& t = totals[u.name];
    t = std::max(t, declared_counts_[i]);
  }
  std::map<std::string, std::uint64_t> rows;
  for (const auto& e : entries_) {
    if (e.uploader.registered && !e.uploader.name.empty()) ++rows[e.uploader.name];
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& u = entries_[i].uploader;
    if (!u.registered || u.name.empty()) {
      u.upload_count = declared_counts_[i];
      continue;
    }
    u.upload_count = std::max(totals[u.name], rows[u.name]);
  }
}

std::vector<ScoredResult> RepoStore::search(std::string_view query_imdb,
                                            const std::optional<std::string>& movie_filename,
                                            const ScoringConfig& config) const {
  const auto id = strip_tt(query_imdb);
  std::vector<ScoredResult> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].imdb_id != id) continue;
    out.push_back({entries_[i], score(entries_[i], id, movie_filename, config), i});
  }
  std::stable_sort(out.begin(), out.end(), [](const ScoredResult& a, const ScoredResult& b) {
    return a.breakdown.total() > b.breakdown.total();
  });
  return out;
}

std::string results_to_json(const std::vector<ScoredResult>& results) {
  auto arr = nlohmann::ordered_json::array();
  std::size_t position = 0;
  for (const auto& r : results) {
    nlohmann::ordered_json o;
    o["position"] = ++position;
    o["subtitle_filename"] = r.entry.subtitle_filename;
    o["imdb_id"] = r.entry.imdb_id;
    o["language"] = r.entry.language;
    o["uploader_name"] = r.entry.uploader.name;
    o["uploader_rank"] = rank_name(r.entry.uploader.rank());
    o["uploader_upload_count"] = r.entry.uploader.upload_count;
    o["imdb_points"] = format_score(r.breakdown.imdb_points);
    o["tag_points"] = format_score(r.breakdown.tag_points);
    o["rank_points"] = format_score(r.breakdown.rank_points);
    o["total"] = format_score(r.breakdown.total());
    arr.push_back(std::move(o));
  }
  return arr.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

std::string results_to_table(const std::vector<ScoredResult>& results) {
  std::ostringstream out;
  char line[64];
  std::size_t position = 0;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%3zu  %8s = ", ++position, format_score(r.breakdown.total()).c_str());
    out << line << format_score(r.breakdown.imdb_points) << " imdb + " << format_score(r.breakdown.tag_points)
        << " tags + " << format_score(r.breakdown.rank_points) << " rank  " << r.entry.subtitle_filename << "  ("
        << (r.entry.uploader.name.empty() ? "-" : r.entry.uploader.name) << ", "
        << rank_name(r.entry.uploader.rank()) << ")\n";
  }
  return out.str();
}

std::pair<int, std::string> handle_search_query(const RepoStore& store, const ScoringConfig& config,
                                                const std::multimap<std::string, std::string>& params) {
  const auto bad = [](const std::string& why) {
    nlohmann::ordered_json o;
    o["error"] = why;
    return std::pair<int, std::string>{400, o.dump()};
  };
  const auto imdb = params.find("imdbid");
  if (imdb == params.end() || params.count("imdbid") != 1) return bad("exactly one imdbid parameter is required");
  if (!all_digits(strip_tt(imdb->second))) return bad("imdbid must be digits, optionally prefixed by tt");
  std::optional<std::string> movie;
  if (const auto m = params.find("moviefilename"); m != params.end()) {
    if (params.count("moviefilename") != 1) return bad("moviefilename given more than once");
    movie = m->second;
  }
  try {
    return {200, results_to_json(store.search(imdb->second, movie, config))};
  } catch (const EmptyMovieTags& e) {
    return bad(e.what());
  }
}

}  // namespace subguard
