#include "core/ingest.hpp"

#include <algorithm>
#include <cctype>

namespace tweetpipe {

namespace {

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isspace(c) != 0;
    });
}

}  // namespace

std::optional<TweetRecord> filter_record(const RawTweetObject& raw,
                                         SkipReason* reason) {
    if (!raw.user_location || blank(*raw.user_location)) {
        if (reason) *reason = SkipReason::missing_location;
        return std::nullopt;
    }
    if (!raw.lang || raw.lang->empty() || *raw.lang == kUndeterminedLanguage) {
        if (reason) *reason = SkipReason::missing_language;
        return std::nullopt;
    }

    TweetRecord record;
    record.created_at = normalize_timestamp(raw.created_at);
    record.tweet_id = raw.id;
    record.language_code = *raw.lang;
    record.raw_location = *raw.user_location;
    record.display_name = raw.user_name;
    record.username = raw.user_screen_name;
    // Retweets carry a retweeted_status object; fixtures without that field
    // fall back to the conventional text prefix.
    record.is_retweet =
        raw.retweeted_status_present || raw.text.rfind("RT @", 0) == 0;
    record.text = raw.text;
    return record;
}

}  // namespace tweetpipe
