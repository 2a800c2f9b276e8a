#pragma once

#include <string>
#include <string_view>

namespace ctxsearch {

// Porter (1980) suffix stripper. Input is expected lowercase ASCII; words of
// length <= 2 and words with non-letter characters are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace ctxsearch
