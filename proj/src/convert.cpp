#include "parse_common.hpp"
#include "subguard/detect.hpp"
#include "subguard/error.hpp"
#include "subguard/markup.hpp"
#include "subguard/parsers.hpp"

namespace subguard {

SubtitleDocument parse_as(FormatId format, std::string_view source, const ParseLimits& limits) {
  switch (format) {
    case FormatId::Srt: return parse_srt(source, limits);
    case FormatId::JacoSub: return parse_jss(source, limits);
    case FormatId::MicroDvd: return parse_microdvd(source, limits);
    case FormatId::Sami: return parse_sami(source, limits);
    case FormatId::SsaAss:
    case FormatId::SubViewer:
    case FormatId::Vtt:
      throw ConversionUnsupported(std::string(format_name(format)) + " input is detected but not parsed");
    case FormatId::Unknown: break;
  }
  throw UnknownFormat("unrecognised subtitle format");
}

std::string convert(std::string_view source, const ParseLimits& limits) {
  limits.validate();
  if (source.empty()) throw UnknownFormat("empty input");
  const auto probe = detect_format(source);
  return serialize_srt(parse_as(probe.format, source, limits));
}

std::string decode_payload(FormatId format, std::string_view raw_text) {
  switch (format) {
    case FormatId::Srt: return detail::decode_srt_payload(raw_text, nullptr);
    case FormatId::JacoSub: return detail::decode_jss_payload(raw_text, nullptr);
    case FormatId::MicroDvd: return detail::decode_microdvd_payload(raw_text, nullptr);
    case FormatId::Sami: return detail::decode_sami_payload(raw_text, nullptr);
    default: break;
  }
  throw ConversionUnsupported("no payload decoder for " + std::string(format_name(format)));
}

std::string plain_projection(FormatId format, std::string_view raw_text) {
  return strip_markup(decode_payload(format, raw_text));
}

}  // namespace subguard
