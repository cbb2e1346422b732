#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tweetpipe {

// One tweet object as delivered by the source, before filtering.
struct RawTweetObject {
    std::string created_at;  // source format, e.g. "Wed Aug 27 13:08:45 +0000 2008"
    std::string id;
    std::string text;
    std::optional<std::string> lang;
    std::string user_name;
    std::string user_screen_name;
    std::optional<std::string> user_location;
    bool retweeted_status_present = false;
};

// The cleaned eleven-attribute record every downstream stage consumes.
struct TweetRecord {
    std::string created_at;  // UTC ISO-8601 once ingested
    std::string tweet_id;
    std::string language_code;
    std::optional<std::string> detected_country;
    std::optional<std::string> detected_city;
    std::optional<std::string> country_iso;  // ISO 3166-1 alpha-2
    std::string raw_location;
    std::string display_name;
    std::string username;
    bool is_retweet = false;
    std::string text;

    bool operator==(const TweetRecord&) const = default;
};

struct ParseError {
    uint64_t byte_offset = 0;
    std::string message;
};

// Parses one JSON line into a RawTweetObject. Unrecognized fields are
// ignored. Never throws on malformed input; returns nullopt and fills
// `err` instead. A record without an id also counts as a parse error.
std::optional<RawTweetObject> parse_raw(std::string_view line, ParseError* err = nullptr);

// Converts a source timestamp ("Wed Aug 27 13:08:45 +0000 2008" or ISO-8601
// with offset) to UTC ISO-8601 "YYYY-MM-DDTHH:MM:SSZ". Strings that parse
// as neither format are returned verbatim.
std::string normalize_timestamp(const std::string& created_at);

// Column order of the cleaned-record CSV.
const std::vector<std::string>& record_csv_header();

std::vector<std::string> record_to_fields(const TweetRecord& record);

// Inverse of record_to_fields. `row` is the 1-based row number used in
// error messages. Enforces the schema invariants (non-empty tweet_id,
// language_code and raw_location; detected_country present iff country_iso
// present; is_retweet is "true" or "false").
TweetRecord record_from_fields(const std::vector<std::string>& fields, uint64_t row);

uint64_t write_records(const std::vector<TweetRecord>& records,
                       const std::filesystem::path& path);

std::vector<TweetRecord> read_records(const std::filesystem::path& path);

// Streaming variant of read_records for inputs larger than memory.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(TweetRecord&&)>& fn);

// Writes records incrementally in the same format as write_records.
class RecordWriter {
public:
    explicit RecordWriter(const std::filesystem::path& path);
    void write(const TweetRecord& record);
    uint64_t count() const { return count_; }
    void close();

private:
    std::ofstream out_;
    uint64_t count_ = 0;
};

}  // namespace tweetpipe
