#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "core/record.hpp"

namespace tweetpipe {

// Per-country aggregation. tweet_count covers originals and retweets;
// retweet_count tracks the retweets among them. Merging is associative and
// commutative, so partitioned counting gives identical results.
struct CountryStats {
    std::string country_iso;
    uint64_t tweet_count = 0;
    uint64_t retweet_count = 0;
    std::map<std::string, uint64_t> per_language_counts;

    CountryStats& merge(const CountryStats& other);
};

// Bucket key for records with no detected country.
inline const std::string kUnknownCountryKey = "unknown";

// Counts every record exactly once, keyed by country ISO code; unresolved
// records accumulate under kUnknownCountryKey.
std::map<std::string, CountryStats> count_by_country(
    const std::vector<TweetRecord>& records);

// Eight half-open tweet-count intervals for country grouping.
struct BinScheme {
    std::vector<uint64_t> boundaries;

    static BinScheme default_scheme() {
        return {{5'000, 50'000, 100'000, 500'000, 1'000'000, 5'000'000, 10'000'000}};
    }

    // 0-based bin index: count belongs to [boundaries[i-1], boundaries[i]).
    size_t bin_of(uint64_t count) const;
    size_t bin_count() const { return boundaries.size() + 1; }
};

struct CountryBin {
    std::vector<std::string> countries;  // ISO codes, ascending
    uint64_t total = 0;
};

// Assigns every counted country (unknown bucket excluded, zero counts
// excluded) to exactly one bin. Bin totals sum to the located tweet total.
std::vector<CountryBin> bin_countries(const std::map<std::string, CountryStats>& counts,
                                      const BinScheme& scheme);

enum class TweetKind { original, retweet };

struct HandleCount {
    std::string username;
    std::optional<std::string> country_iso;  // modal detected country
    uint64_t count = 0;
    TweetKind kind = TweetKind::original;
};

// Handles ranked by record count of the given kind, descending, ties by
// username ascending. Each handle carries its modal country over all of its
// records (ties by ISO ascending; absent when no record resolved).
std::vector<HandleCount> top_users(const std::vector<TweetRecord>& records, size_t k,
                                   TweetKind kind);

struct CountryShare {
    std::string country_iso;  // kUnknownCountryKey for unattributed handles
    uint64_t handles = 0;
    uint32_t share_tenths = 0;  // percentage in tenths, one decimal
};

// Country composition of a top-handle list, largest share first (ties by
// ISO ascending).
std::vector<CountryShare> country_share_of_top(const std::vector<HandleCount>& top);

// Lowercased word tokens: maximal runs of letters/digits/apostrophes, plus
// standalone "-" and "%" between whitespace. Whitespace-delimited chunks
// that are @mentions or URLs are dropped entirely; a leading '#' is
// stripped so the hashtag body counts as a word.
std::vector<std::string> tokenize(std::string_view text);

// Top-n tokens over all record texts, count descending, ties by token
// ascending.
std::vector<std::pair<std::string, uint64_t>> word_frequency(
    const std::vector<TweetRecord>& records, size_t n);

struct LanguageDistribution {
    std::map<std::string, uint64_t> counts;
    size_t distinct = 0;
};

LanguageDistribution language_distribution(const std::vector<TweetRecord>& records);

struct NativeLanguageRow {
    std::string country_iso;
    std::vector<std::string> native_languages;  // ascending
    uint64_t total_tweets = 0;
    uint64_t tweets_in_native = 0;
    uint32_t pct_native_tenths = 0;
    uint32_t pct_other_tenths = 0;  // complement, so the pair sums to 100.0
};

// Native-language share for the highest-tweet countries (top 10 by
// default). Throws Error(invalid_argument) naming any country missing from
// the native map.
std::vector<NativeLanguageRow> native_language_table(
    const std::vector<TweetRecord>& records,
    const std::map<std::string, std::set<std::string>>& native_map,
    size_t top_countries = 10);

// Percentage of numerator/denominator in tenths of a percent, one decimal,
// ties rounding down (96.75% -> 967). Zero denominator yields 0.
uint32_t percent_tenths(uint64_t numerator, uint64_t denominator);

// "87.5" for 875.
std::string format_tenths(uint32_t tenths);

// Loads country_iso,language_code rows (header required, multiple rows per
// country).
std::map<std::string, std::set<std::string>> load_native_map(
    const std::filesystem::path& path);

}  // namespace tweetpipe
