#pragma once

#include <string>
#include <vector>

namespace ctxsearch {

/// Maximum number of words kept per meta keyword.
inline constexpr std::size_t kMetaKeywordMaxWords = 5;
/// Maximum number of meta keywords kept per page and shown per stage.
inline constexpr std::size_t kMetaKeywordsPerPage = 5;

/// A short normalized keyword phrase taken from page metadata.
struct MetaKeyword {
  std::vector<std::string> words;

  bool operator==(const MetaKeyword&) const = default;
  auto operator<=>(const MetaKeyword&) const = default;
};

}  // namespace ctxsearch
