#include "core/record.hpp"

#include <cstdio>
#include <cstring>
#include <ctime>

#include <nlohmann/json.hpp>

#include "core/civil_time.hpp"
#include "core/csv.hpp"
#include "core/errors.hpp"

namespace tweetpipe {

namespace {

using nlohmann::json;

std::optional<std::string> get_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

int month_from_abbrev(const char* abbrev) {
    static const char* names[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                  "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    for (int i = 0; i < 12; ++i)
        if (std::strncmp(abbrev, names[i], 3) == 0) return i + 1;
    return 0;
}

bool parse_offset(const char* s, int* offset_seconds) {
    // "+HHMM", "-HHMM", "+HH:MM" or "Z".
    if (s[0] == 'Z' && s[1] == '\0') {
        *offset_seconds = 0;
        return true;
    }
    int sign = s[0] == '+' ? 1 : s[0] == '-' ? -1 : 0;
    if (!sign) return false;
    int hh, mm;
    if (std::sscanf(s + 1, "%2d:%2d", &hh, &mm) == 2 ||
        std::sscanf(s + 1, "%2d%2d", &hh, &mm) == 2) {
        *offset_seconds = sign * (hh * 3600 + mm * 60);
        return true;
    }
    return false;
}

}  // namespace

std::optional<RawTweetObject> parse_raw(std::string_view line, ParseError* err) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
        // Re-parse with exceptions to recover the error position.
        if (err) {
            try {
                [[maybe_unused]] auto reparsed = json::parse(line);
            } catch (const json::parse_error& e) {
                err->byte_offset = e.byte;
                err->message = e.what();
            }
        }
        return std::nullopt;
    }
    if (!obj.is_object()) {
        if (err) *err = {0, "line is not a JSON object"};
        return std::nullopt;
    }

    RawTweetObject raw;
    if (auto id = get_string(obj, "id_str")) {
        raw.id = *id;
    } else if (auto it = obj.find("id"); it != obj.end() && it->is_number_integer()) {
        raw.id = std::to_string(it->get<int64_t>());
    }
    if (raw.id.empty()) {
        if (err) *err = {0, "tweet object has no id"};
        return std::nullopt;
    }

    raw.created_at = get_string(obj, "created_at").value_or("");
    raw.text = get_string(obj, "text").value_or("");
    raw.lang = get_string(obj, "lang");
    raw.retweeted_status_present = obj.contains("retweeted_status");

    if (auto user = obj.find("user"); user != obj.end() && user->is_object()) {
        raw.user_name = get_string(*user, "name").value_or("");
        raw.user_screen_name = get_string(*user, "screen_name").value_or("");
        raw.user_location = get_string(*user, "location");
    }
    return raw;
}

std::string normalize_timestamp(const std::string& created_at) {
    int day, hh, mm, ss, year;
    char mon[4] = {0}, dow[4] = {0}, offset[8] = {0};

    // Classic source format: "Wed Aug 27 13:08:45 +0000 2008".
    if (std::sscanf(created_at.c_str(), "%3s %3s %d %d:%d:%d %6s %d", dow, mon,
                    &day, &hh, &mm, &ss, offset, &year) == 8) {
        int month = month_from_abbrev(mon);
        int off;
        if (month && parse_offset(offset, &off)) {
            int64_t epoch = civil::days_from_civil(year, month, day) * 86400 +
                            hh * 3600 + mm * 60 + ss;
            return civil::format_iso8601_utc(epoch - off);
        }
    }

    // ISO-8601 with offset or Z.
    int month;
    int consumed = 0;
    if (std::sscanf(created_at.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month,
                    &day, &hh, &mm, &ss, &consumed) == 6 &&
        consumed > 0) {
        int off;
        if (parse_offset(created_at.c_str() + consumed, &off)) {
            int64_t epoch = civil::days_from_civil(year, month, day) * 86400 +
                            hh * 3600 + mm * 60 + ss;
            return civil::format_iso8601_utc(epoch - off);
        }
    }
    return created_at;
}

const std::vector<std::string>& record_csv_header() {
    static const std::vector<std::string> header = {
        "created_at",   "tweet_id",     "language_code", "detected_country",
        "detected_city", "country_iso", "raw_location",  "display_name",
        "username",     "is_retweet",   "text"};
    return header;
}

std::vector<std::string> record_to_fields(const TweetRecord& r) {
    return {r.created_at,
            r.tweet_id,
            r.language_code,
            r.detected_country.value_or(""),
            r.detected_city.value_or(""),
            r.country_iso.value_or(""),
            r.raw_location,
            r.display_name,
            r.username,
            r.is_retweet ? "true" : "false",
            r.text};
}

namespace {

std::optional<std::string> field_to_optional(const std::string& field) {
    if (field.empty()) return std::nullopt;
    return field;
}

[[noreturn]] void bad_row(uint64_t row, const std::string& what) {
    fail(ErrorCode::parse, "record row " + std::to_string(row) + ": " + what);
}

}  // namespace

TweetRecord record_from_fields(const std::vector<std::string>& fields, uint64_t row) {
    if (fields.size() != record_csv_header().size())
        bad_row(row, "expected 11 fields, got " + std::to_string(fields.size()));

    TweetRecord r;
    r.created_at = fields[0];
    r.tweet_id = fields[1];
    r.language_code = fields[2];
    r.detected_country = field_to_optional(fields[3]);
    r.detected_city = field_to_optional(fields[4]);
    r.country_iso = field_to_optional(fields[5]);
    r.raw_location = fields[6];
    r.display_name = fields[7];
    r.username = fields[8];
    if (fields[9] == "true")
        r.is_retweet = true;
    else if (fields[9] == "false")
        r.is_retweet = false;
    else
        bad_row(row, "is_retweet must be true or false, got \"" + fields[9] + "\"");
    r.text = fields[10];

    if (r.tweet_id.empty()) bad_row(row, "empty tweet_id");
    if (r.language_code.empty()) bad_row(row, "empty language_code");
    if (r.raw_location.empty()) bad_row(row, "empty raw_location");
    if (r.detected_country.has_value() != r.country_iso.has_value())
        bad_row(row, "detected_country and country_iso must be set together");
    return r;
}

RecordWriter::RecordWriter(const std::filesystem::path& path)
    : out_(csv::open_output(path)) {
    csv::write_row(out_, record_csv_header());
}

void RecordWriter::write(const TweetRecord& record) {
    csv::write_row(out_, record_to_fields(record));
    ++count_;
}

void RecordWriter::close() {
    out_.flush();
    if (!out_) fail(ErrorCode::io, "record write failed");
    out_.close();
}

uint64_t write_records(const std::vector<TweetRecord>& records,
                       const std::filesystem::path& path) {
    RecordWriter writer(path);
    for (const auto& r : records) writer.write(r);
    writer.close();
    return writer.count();
}

void for_each_record(const std::filesystem::path& path,
                     const std::function<void(TweetRecord&&)>& fn) {
    std::ifstream in = csv::open_input(path);
    csv::Reader reader(in);
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields != record_csv_header())
        fail(ErrorCode::parse, path.string() + ": missing or wrong header row");
    while (reader.next(fields)) fn(record_from_fields(fields, reader.row_number()));
}

std::vector<TweetRecord> read_records(const std::filesystem::path& path) {
    std::vector<TweetRecord> records;
    for_each_record(path, [&](TweetRecord&& r) { records.push_back(std::move(r)); });
    return records;
}

}  // namespace tweetpipe
