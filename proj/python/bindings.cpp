#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subguard/archive.hpp"
#include "subguard/detect.hpp"
#include "subguard/error.hpp"
#include "subguard/parsers.hpp"
#include "subguard/ranking.hpp"
#include "subguard/robustness.hpp"
#include "subguard/sanitize.hpp"
#include "subguard/threatscan.hpp"

namespace py = pybind11;
using namespace subguard;

namespace {

std::string_view view(const py::bytes& b) {
  char* data = nullptr;
  py::ssize_t size = 0;
  PYBIND11_BYTES_AS_STRING_AND_SIZE(b.ptr(), &data, &size);
  return {data, static_cast<std::size_t>(size)};
}

FormatId format_arg(const std::optional<std::string>& name, std::string_view data) {
  if (!name) return detect_format(data).format;
  const auto f = format_from_name(*name);
  if (!f) throw std::invalid_argument("unknown format name: " + *name);
  return *f;
}

SanitizePolicy policy_arg(const std::string& name) {
  const auto p = SanitizePolicy::from_name(name);
  if (!p) throw std::invalid_argument("unknown policy: " + name);
  return *p;
}

py::object opt_location(const std::optional<Location>& l) {
  if (!l) return py::none();
  return py::dict(py::arg("line") = l->line, py::arg("byte_offset") = l->byte_offset);
}

py::dict document_dict(const SubtitleDocument& doc) {
  py::list cues;
  for (const auto& c : doc.cues) {
    cues.append(py::dict(py::arg("index") = c.index ? py::cast(*c.index) : py::none(),
                         py::arg("start_ms") = c.start.millis(), py::arg("end_ms") = c.end.millis(),
                         py::arg("text") = flatten(c.content), py::arg("markup") = describe(c.content),
                         py::arg("raw") = py::bytes(c.raw_text), py::arg("line") = c.raw_location.line,
                         py::arg("byte_offset") = c.raw_location.byte_offset));
  }
  py::list warnings;
  for (const auto& w : doc.warnings) {
    warnings.append(py::dict(py::arg("code") = std::string(warning_name(w.code)), py::arg("message") = w.message,
                             py::arg("line") = w.location.line, py::arg("byte_offset") = w.location.byte_offset));
  }
  return py::dict(py::arg("format") = std::string(format_name(doc.format)), py::arg("cues") = cues,
                  py::arg("warnings") = warnings);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Subtitle parsing, scanning and ranking";

  auto base = py::register_exception<Error>(m, "SubguardError", PyExc_RuntimeError);
  py::register_exception<LimitExceeded>(m, "LimitExceeded", base.ptr());
  py::register_exception<UnknownFormat>(m, "UnknownFormat", base.ptr());
  py::register_exception<NotAZip>(m, "NotAZip", base.ptr());
  py::register_exception<CorruptCentralDirectory>(m, "CorruptCentralDirectory", base.ptr());
  py::register_exception<EmptyMovieTags>(m, "EmptyMovieTags", base.ptr());
  py::register_exception<EmptyCorpus>(m, "EmptyCorpus", base.ptr());

  m.def(
      "detect",
      [](const py::bytes& data, std::size_t max_probe_lines) {
        const auto r = detect_format(view(data), max_probe_lines);
        return py::dict(py::arg("format") = std::string(format_name(r.format)),
                        py::arg("confidence") = std::string(confidence_name(r.confidence)),
                        py::arg("line") = r.matched_line ? py::cast(r.matched_line->line) : py::none());
      },
      py::arg("data"), py::arg("max_probe_lines") = 128);

  m.def(
      "parse",
      [](const py::bytes& data, const std::optional<std::string>& format) {
        const auto src = view(data);
        return document_dict(parse_as(format_arg(format, src), src));
      },
      py::arg("data"), py::arg("format") = py::none());

  m.def(
      "convert", [](const py::bytes& data) { return py::bytes(convert(view(data))); }, py::arg("data"));

  m.def(
      "scan_json",
      [](const std::string& target, const py::bytes& data, const std::string& policy) {
        ScanOptions opts;
        opts.policy = policy_arg(policy);
        return report_to_json(scan_bytes(target, view(data), opts));
      },
      py::arg("target"), py::arg("data"), py::arg("policy") = "none");

  m.def(
      "sanitize",
      [](const py::bytes& data, const std::string& policy, const std::optional<std::string>& format) {
        const auto src = view(data);
        auto doc = parse_as(format_arg(format, src), src);
        const auto p = policy_arg(policy);
        py::list findings;
        for (std::size_t i = 0; i < doc.cues.size(); ++i) {
          auto r = sanitize(doc.cues[i].content, p);
          for (const auto& f : r.findings) {
            findings.append(py::dict(py::arg("cue") = i, py::arg("kind") = std::string(sanitize_kind_name(f.kind)),
                                     py::arg("path") = f.path, py::arg("tag") = f.tag,
                                     py::arg("attribute") = f.attribute, py::arg("message") = f.message));
          }
          doc.cues[i].content = std::move(r.content);
        }
        return py::make_tuple(py::bytes(serialize_srt(doc)), findings);
      },
      py::arg("data"), py::arg("policy") = "strict", py::arg("format") = py::none());

  m.def("tokenize_tags", [](const std::string& name) { return tokenize_tags(name); }, py::arg("name"));

  m.def(
      "match_tags",
      [](const std::string& movie, const std::string& subtitle) {
        const auto s = match_tags(movie, subtitle);
        return py::make_tuple(s.numerator(), s.denominator());
      },
      py::arg("movie_filename"), py::arg("subtitle_filename"),
      "Tag score as a (numerator, denominator) pair.");

  m.def(
      "rank_json",
      [](const std::string& manifest, const std::string& imdb, const std::optional<std::string>& movie) {
        RepoStore store;
        store.ingest(std::filesystem::path(manifest));
        return results_to_json(store.search(imdb, movie));
      },
      py::arg("manifest"), py::arg("imdb_id"), py::arg("movie_filename") = py::none());

  m.def(
      "list_zip",
      [](const py::bytes& data) {
        py::list out;
        for (const auto& e : list_zip(view(data))) {
          out.append(py::dict(py::arg("name") = py::bytes(e.raw_name),
                              py::arg("normalized") = e.normalized ? py::cast(*e.normalized) : py::none(),
                              py::arg("is_dir") = e.is_dir, py::arg("is_symlink") = e.is_symlink,
                              py::arg("encrypted") = e.encrypted, py::arg("method") = e.method,
                              py::arg("size") = e.uncompressed_size));
        }
        return out;
      },
      py::arg("data"));

  m.def(
      "fuzz_json",
      [](const std::string& format, const std::vector<py::bytes>& seeds, std::uint64_t iterations, std::uint64_t seed) {
        const auto f = format_from_name(format);
        if (!f) throw std::invalid_argument("unknown format name: " + format);
        std::vector<std::string> inputs;
        for (const auto& s : seeds) inputs.emplace_back(view(s));
        MutationConfig cfg;
        cfg.iterations = iterations;
        cfg.seed = seed;
        py::gil_scoped_release release;
        return fuzz_seeds(*f, inputs, cfg).to_json();
      },
      py::arg("format"), py::arg("seeds"), py::arg("iterations") = 1000, py::arg("seed") = 0);
}
