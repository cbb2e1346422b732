#include "core/textnorm.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "core/errors.hpp"

namespace tweetpipe {

namespace {

const icu::Normalizer2& nfd() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* instance = icu::Normalizer2::getNFDInstance(status);
    if (U_FAILURE(status) || !instance)
        fail(ErrorCode::domain, "ICU NFD normalizer unavailable");
    return *instance;
}

bool is_combining_mark(UChar32 c) {
    int8_t type = u_charType(c);
    return type == U_NON_SPACING_MARK || type == U_ENCLOSING_MARK;
}

icu::UnicodeString decompose_and_strip(const icu::UnicodeString& input) {
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString decomposed = nfd().normalize(input, status);
    if (U_FAILURE(status)) decomposed = input;

    icu::UnicodeString out;
    for (int32_t i = 0; i < decomposed.length();) {
        UChar32 c = decomposed.char32At(i);
        if (!is_combining_mark(c)) out.append(c);
        i += U16_LENGTH(c);
    }
    return out;
}

}  // namespace

std::string normalize_diacritics(std::string_view text) {
    icu::UnicodeString s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    s = decompose_and_strip(s);
    s.foldCase(U_FOLD_CASE_DEFAULT);
    // Folding can emit precomposed or marked characters; one more pass
    // keeps the function idempotent.
    s = decompose_and_strip(s);

    std::string out;
    s.toUTF8String(out);
    return out;
}

std::string fold_case(std::string_view text) {
    icu::UnicodeString s = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    s.foldCase(U_FOLD_CASE_DEFAULT);
    std::string out;
    s.toUTF8String(out);
    return out;
}

bool word_char_at(std::string_view text, size_t index) {
    if (index >= text.size()) return false;
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    int32_t i = static_cast<int32_t>(index);
    UChar32 c;
    U8_NEXT(bytes, i, static_cast<int32_t>(text.size()), c);
    return c >= 0 && u_isalnum(c);
}

bool word_char_before(std::string_view text, size_t index) {
    if (index == 0 || index > text.size()) return false;
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    int32_t i = static_cast<int32_t>(index);
    UChar32 c;
    U8_PREV(bytes, 0, i, c);
    return c >= 0 && u_isalnum(c);
}

}  // namespace tweetpipe
