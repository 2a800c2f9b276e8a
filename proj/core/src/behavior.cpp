#include "ctxsearch/behavior.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_set>

#include "ctxsearch/error.hpp"
#include "text_util.hpp"

namespace ctxsearch {
namespace {

std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from = 0) {
  if (needle.empty() || hay.size() < needle.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size() && match; ++k) {
      match = std::tolower(static_cast<unsigned char>(hay[i + k])) ==
              std::tolower(static_cast<unsigned char>(needle[k]));
    }
    if (match) return i;
  }
  return std::string_view::npos;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  static const std::map<std::string, std::string, std::less<>> kNamed{
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    const auto name = s.substr(i + 1, semi - i - 1);
    if (!name.empty() && name[0] == '#') {
      unsigned long cp = 0;
      bool ok = name.size() > 1;
      const bool hex = ok && (name[1] == 'x' || name[1] == 'X');
      for (std::size_t k = hex ? 2 : 1; k < name.size() && ok; ++k) {
        const auto c = static_cast<unsigned char>(name[k]);
        if (hex && std::isxdigit(c)) {
          cp = cp * 16 + static_cast<unsigned long>(std::isdigit(c) ? c - '0' : std::tolower(c) - 'a' + 10);
        } else if (!hex && std::isdigit(c)) {
          cp = cp * 10 + (c - '0');
        } else {
          ok = false;
        }
      }
      if (ok) {
        append_utf8(out, cp);
        i = semi;
        continue;
      }
    } else if (auto it = kNamed.find(detail::to_lower(name)); it != kNamed.end()) {
      out += it->second;
      i = semi;
      continue;
    }
    out.push_back('&');
  }
  return out;
}

std::string collapse_space(std::string_view s) {
  std::string out;
  bool pending = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

// Attributes of a start tag body such as `meta name="keywords" content=a`.
std::map<std::string, std::string> parse_attributes(std::string_view tag) {
  std::map<std::string, std::string> attrs;
  std::size_t i = 0;
  while (i < tag.size() && !std::isspace(static_cast<unsigned char>(tag[i]))) ++i;  // tag name
  while (i < tag.size()) {
    while (i < tag.size() && (std::isspace(static_cast<unsigned char>(tag[i])) || tag[i] == '/')) ++i;
    const std::size_t key_start = i;
    while (i < tag.size() && tag[i] != '=' && !std::isspace(static_cast<unsigned char>(tag[i])) &&
           tag[i] != '/') {
      ++i;
    }
    std::string key = detail::to_lower(tag.substr(key_start, i - key_start));
    while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
    std::string value;
    if (i < tag.size() && tag[i] == '=') {
      ++i;
      while (i < tag.size() && std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
      if (i < tag.size() && (tag[i] == '"' || tag[i] == '\'')) {
        const char q = tag[i++];
        const auto end = tag.find(q, i);
        value = std::string(tag.substr(i, end == std::string_view::npos ? std::string_view::npos : end - i));
        i = end == std::string_view::npos ? tag.size() : end + 1;
      } else {
        const std::size_t v = i;
        while (i < tag.size() && !std::isspace(static_cast<unsigned char>(tag[i]))) ++i;
        value = std::string(tag.substr(v, i - v));
      }
    }
    if (!key.empty()) attrs.try_emplace(std::move(key), decode_entities(value));
    if (key_start == i) ++i;
  }
  return attrs;
}

std::string tag_name(std::string_view tag) {
  std::size_t n = 0;
  while (n < tag.size() && (std::isalnum(static_cast<unsigned char>(tag[n])) || tag[n] == '/' || tag[n] == '!')) ++n;
  return detail::to_lower(tag.substr(0, n));
}

}  // namespace

PageMetadata extract_page_metadata(std::string_view doc, std::string_view url) {
  PageMetadata meta;
  meta.url = std::string(url);
  bool have_keywords = false;
  bool have_description = false;
  std::size_t pos = 0;
  while (true) {
    const auto lt = doc.find('<', pos);
    if (lt == std::string_view::npos) break;
    const auto gt = doc.find('>', lt + 1);
    if (gt == std::string_view::npos) break;
    const auto tag = doc.substr(lt + 1, gt - lt - 1);
    pos = gt + 1;
    const auto name = tag_name(tag);
    if (name == "title" && meta.title.empty()) {
      const auto close = ifind(doc, "</title", pos);
      const auto text = doc.substr(pos, close == std::string_view::npos ? std::string_view::npos : close - pos);
      meta.title = collapse_space(decode_entities(text));
      if (close != std::string_view::npos) pos = close;
    } else if (name == "meta") {
      const auto attrs = parse_attributes(tag);
      auto key = attrs.find("name");
      if (key == attrs.end()) key = attrs.find("property");
      const auto content = attrs.find("content");
      if (key == attrs.end() || content == attrs.end()) continue;
      const auto kind = detail::to_lower(key->second);
      if (kind == "keywords" && !have_keywords) {
        have_keywords = true;
        for (const auto& part : detail::split(content->second, ',')) {
          auto t = collapse_space(part);
          if (!t.empty()) meta.meta_keywords_raw.push_back(std::move(t));
        }
      } else if ((kind == "description" || kind == "og:description") && !have_description) {
        have_description = true;
        meta.description = collapse_space(content->second);
      }
    } else if (name == "script" || name == "style") {
      const auto close = ifind(doc, "</" + name, pos);
      if (close == std::string_view::npos) break;
      pos = close;
    }
  }
  return meta;
}

std::string extract_body_text(std::string_view doc) {
  std::size_t start = 0;
  if (const auto b = ifind(doc, "<body"); b != std::string_view::npos) {
    const auto gt = doc.find('>', b);
    start = gt == std::string_view::npos ? doc.size() : gt + 1;
  }
  auto end = ifind(doc, "</body", start);
  if (end == std::string_view::npos) end = doc.size();
  const auto body = doc.substr(start, end - start);

  std::string text;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto lt = body.find('<', pos);
    text.append(body.substr(pos, lt == std::string_view::npos ? std::string_view::npos : lt - pos));
    if (lt == std::string_view::npos) break;
    const auto gt = body.find('>', lt + 1);
    if (gt == std::string_view::npos) break;
    const auto name = tag_name(body.substr(lt + 1, gt - lt - 1));
    pos = gt + 1;
    if (name == "script" || name == "style") {
      const auto close = ifind(body, "</" + name, pos);
      if (close == std::string_view::npos) break;
      const auto close_gt = body.find('>', close);
      pos = close_gt == std::string_view::npos ? body.size() : close_gt + 1;
    }
    text.push_back(' ');
  }
  return collapse_space(decode_entities(text));
}

std::vector<MetaKeyword> build_meta_keywords(const PageMetadata& meta,
                                             const std::vector<std::string>& query_keywords,
                                             const StopwordList& stopwords) {
  const std::unordered_set<std::string> keywords(query_keywords.begin(), query_keywords.end());
  std::vector<std::string> raws = meta.meta_keywords_raw;
  if (raws.empty() && !meta.title.empty()) raws.push_back(meta.title);

  std::vector<MetaKeyword> out;
  for (const auto& raw : raws) {
    if (out.size() == kMetaKeywordsPerPage) break;
    MetaKeyword mk;
    for (auto& w : normalize_text(raw, stopwords)) {
      if (mk.words.size() == kMetaKeywordMaxWords) break;
      if (!keywords.contains(w)) mk.words.push_back(std::move(w));
    }
    if (mk.words.empty()) continue;
    if (std::find(out.begin(), out.end(), mk) != out.end()) continue;
    out.push_back(std::move(mk));
  }
  return out;
}

ProfileEntry record_click(PersonalProfile& profile, ProfileEntry entry, std::string_view url,
                          std::string_view document, const ClickContext& ctx) {
  return record_click(profile, std::move(entry), url, extract_page_metadata(document, url), ctx);
}

ProfileEntry record_click(PersonalProfile& profile, ProfileEntry entry, std::string_view url,
                          const PageMetadata& page, const ClickContext& ctx) {
  const bool presented =
      ctx.presented_urls != nullptr &&
      std::find(ctx.presented_urls->begin(), ctx.presented_urls->end(), url) != ctx.presented_urls->end();
  if (!presented) throw ValidationError("url '" + std::string(url) + "' was not presented in this session");

  const bool first_click =
      std::find(entry.clicked_urls.begin(), entry.clicked_urls.end(), url) == entry.clicked_urls.end();
  entry.clicked_urls.emplace_back(url);
  if (first_click && ctx.stopwords != nullptr) {
    for (auto& mk : build_meta_keywords(page, entry.query_keywords, *ctx.stopwords)) {
      auto& list = entry.extracted_meta_keywords;
      if (std::find(list.begin(), list.end(), mk) == list.end()) list.push_back(std::move(mk));
    }
  }
  const bool recorded = std::any_of(profile.entries.begin(), profile.entries.end(),
                                    [&](const ProfileEntry& e) { return e.entry_id == entry.entry_id; });
  if (recorded) update_entry(profile, entry);
  return entry;
}

}  // namespace ctxsearch
