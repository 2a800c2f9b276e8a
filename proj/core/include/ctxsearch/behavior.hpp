#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ctxsearch/lexicon.hpp"
#include "ctxsearch/meta_keyword.hpp"
#include "ctxsearch/profile_store.hpp"

namespace ctxsearch {

/// What the behavior collector reads from a visited page.
struct PageMetadata {
  std::string url;
  std::string title;
  std::vector<std::string> meta_keywords_raw;
  std::string description;

  bool operator==(const PageMetadata&) const = default;
};

/// Best-effort scan of HTML-like markup for the title element and the
/// `keywords` / `description` meta tags. Never throws; missing pieces are
/// left empty.
PageMetadata extract_page_metadata(std::string_view document, std::string_view url);

/// Text between <body> and </body> (whole document if absent) with tags,
/// scripts and styles removed and common entities decoded.
std::string extract_body_text(std::string_view document);

/// Turns raw keyword metadata into at most five meta keywords of at most five
/// normalized words each, with stopwords and query keywords removed. Falls
/// back to the title when the page has no keyword metadata.
std::vector<MetaKeyword> build_meta_keywords(const PageMetadata& meta,
                                             const std::vector<std::string>& query_keywords,
                                             const StopwordList& stopwords);

/// Inputs the click recorder needs besides the entry itself.
struct ClickContext {
  /// URLs shown as hits in the current session.
  const std::vector<std::string>* presented_urls = nullptr;
  const StopwordList* stopwords = nullptr;
};

/// Appends `url` to the entry's clicks. On the first click of a URL within
/// the entry, meta keywords extracted from `document` are merged into
/// extracted_meta_keywords (deduplicated; the per-page cap of
/// build_meta_keywords applies). If the entry is
/// already recorded in `profile` it is re-persisted. Throws ValidationError
/// when `url` was not presented.
ProfileEntry record_click(PersonalProfile& profile, ProfileEntry session_entry, std::string_view url,
                          std::string_view document, const ClickContext& ctx);

/// Same, for a page whose metadata is already known (e.g. from the index).
ProfileEntry record_click(PersonalProfile& profile, ProfileEntry session_entry, std::string_view url,
                          const PageMetadata& page, const ClickContext& ctx);

}  // namespace ctxsearch
