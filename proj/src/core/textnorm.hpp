#pragma once

#include <string>
#include <string_view>

namespace tweetpipe {

// Canonical form used for gazetteer matching: canonical decomposition,
// combining marks removed, case folded. Idempotent; "São Paulo" becomes
// "sao paulo".
std::string normalize_diacritics(std::string_view text);

// Full Unicode case fold without decomposition ("São" -> "são").
std::string fold_case(std::string_view text);

// True when the code point at byte `index` (or the one preceding it, for
// `word_char_before`) is a Unicode letter or digit. Out-of-range indices
// count as non-word, so string edges behave as word boundaries.
bool word_char_at(std::string_view text, size_t index);
bool word_char_before(std::string_view text, size_t index);

}  // namespace tweetpipe
