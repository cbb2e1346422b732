#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "core/record.hpp"

namespace tweetpipe {

enum class SkipReason { missing_location, missing_language };

struct IngestStats {
    uint64_t seen = 0;
    uint64_t skipped_missing_location = 0;
    uint64_t skipped_missing_language = 0;
    uint64_t parse_errors = 0;
    uint64_t duplicates_removed = 0;
    uint64_t kept = 0;

    // seen must always equal the sum of the outcome buckets.
    bool accounting_identity_holds() const {
        return seen == kept + skipped_missing_location + skipped_missing_language +
                           parse_errors + duplicates_removed;
    }

    IngestStats& operator+=(const IngestStats& other) {
        seen += other.seen;
        skipped_missing_location += other.skipped_missing_location;
        skipped_missing_language += other.skipped_missing_language;
        parse_errors += other.parse_errors;
        duplicates_removed += other.duplicates_removed;
        kept += other.kept;
        return *this;
    }
};

// The language code sources report when detection failed.
inline constexpr const char* kUndeterminedLanguage = "und";

// Keeps a record only when the user reported a location (non-blank after
// trimming) and the source detected a language. Detected country fields
// stay unset; resolution happens in a later stage. created_at is normalized
// to UTC ISO-8601 when the source format parses.
std::optional<TweetRecord> filter_record(const RawTweetObject& raw,
                                         SkipReason* reason = nullptr);

}  // namespace tweetpipe
