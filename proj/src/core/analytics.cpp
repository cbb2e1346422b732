#include "core/analytics.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/textnorm.hpp"

namespace tweetpipe {

CountryStats& CountryStats::merge(const CountryStats& other) {
    tweet_count += other.tweet_count;
    retweet_count += other.retweet_count;
    for (const auto& [lang, count] : other.per_language_counts)
        per_language_counts[lang] += count;
    return *this;
}

std::map<std::string, CountryStats> count_by_country(
    const std::vector<TweetRecord>& records) {
    std::map<std::string, CountryStats> counts;
    for (const auto& r : records) {
        const std::string& key = r.country_iso ? *r.country_iso : kUnknownCountryKey;
        CountryStats& stats = counts[key];
        stats.country_iso = key;
        ++stats.tweet_count;
        if (r.is_retweet) ++stats.retweet_count;
        ++stats.per_language_counts[r.language_code];
    }
    return counts;
}

size_t BinScheme::bin_of(uint64_t count) const {
    size_t bin = 0;
    while (bin < boundaries.size() && count >= boundaries[bin]) ++bin;
    return bin;
}

std::vector<CountryBin> bin_countries(const std::map<std::string, CountryStats>& counts,
                                      const BinScheme& scheme) {
    std::vector<CountryBin> bins(scheme.bin_count());
    for (const auto& [iso, stats] : counts) {
        if (iso == kUnknownCountryKey || stats.tweet_count == 0) continue;
        CountryBin& bin = bins[scheme.bin_of(stats.tweet_count)];
        bin.countries.push_back(iso);
        bin.total += stats.tweet_count;
    }
    return bins;  // map iteration already yields ISO codes in ascending order
}

std::vector<HandleCount> top_users(const std::vector<TweetRecord>& records, size_t k,
                                   TweetKind kind) {
    if (k == 0) fail(ErrorCode::invalid_argument, "top_users needs k >= 1");

    struct PerUser {
        uint64_t originals = 0;
        uint64_t retweets = 0;
        std::map<std::string, uint64_t> countries;
    };
    std::unordered_map<std::string, PerUser> users;
    for (const auto& r : records) {
        PerUser& u = users[r.username];
        if (r.is_retweet)
            ++u.retweets;
        else
            ++u.originals;
        if (r.country_iso) ++u.countries[*r.country_iso];
    }

    std::vector<HandleCount> ranked;
    for (const auto& [username, u] : users) {
        uint64_t count = kind == TweetKind::original ? u.originals : u.retweets;
        if (count == 0) continue;
        HandleCount handle;
        handle.username = username;
        handle.count = count;
        handle.kind = kind;
        // Modal country over all of the user's records, ties by ISO.
        uint64_t best = 0;
        for (const auto& [iso, c] : u.countries) {
            if (c > best) {
                best = c;
                handle.country_iso = iso;
            }
        }
        ranked.push_back(std::move(handle));
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.username < b.username;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

std::vector<CountryShare> country_share_of_top(const std::vector<HandleCount>& top) {
    if (top.empty()) fail(ErrorCode::invalid_argument, "empty top-handle list");
    std::map<std::string, uint64_t> by_country;
    for (const auto& handle : top)
        ++by_country[handle.country_iso ? *handle.country_iso : kUnknownCountryKey];

    std::vector<CountryShare> shares;
    for (const auto& [iso, handles] : by_country)
        shares.push_back({iso, handles, percent_tenths(handles, top.size())});
    std::sort(shares.begin(), shares.end(), [](const auto& a, const auto& b) {
        if (a.handles != b.handles) return a.handles > b.handles;
        return a.country_iso < b.country_iso;
    });
    return shares;
}

namespace {

bool is_token_char(UChar32 c) {
    return u_isalnum(c) || c == '\'' || c == 0x2019;  // ASCII and right quote
}

bool has_alnum(std::string_view token) {
    const auto* bytes = reinterpret_cast<const uint8_t*>(token.data());
    int32_t i = 0;
    int32_t length = static_cast<int32_t>(token.size());
    while (i < length) {
        UChar32 c;
        U8_NEXT(bytes, i, length, c);
        if (c >= 0 && u_isalnum(c)) return true;
    }
    return false;
}

bool starts_with_ci(std::string_view text, std::string_view prefix) {
    if (text.size() < prefix.size()) return false;
    for (size_t i = 0; i < prefix.size(); ++i) {
        char a = text[i];
        if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
        if (a != prefix[i]) return false;
    }
    return true;
}

void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
    if (chunk.empty() || chunk.front() == '@') return;
    if (starts_with_ci(chunk, "http://") || starts_with_ci(chunk, "https://") ||
        starts_with_ci(chunk, "www."))
        return;
    if (chunk == "-" || chunk == "%") {
        out.emplace_back(chunk);
        return;
    }
    while (!chunk.empty() && chunk.front() == '#') chunk.remove_prefix(1);

    const auto* bytes = reinterpret_cast<const uint8_t*>(chunk.data());
    int32_t length = static_cast<int32_t>(chunk.size());
    int32_t i = 0;
    int32_t run_start = -1;
    auto flush = [&](int32_t end) {
        if (run_start < 0) return;
        std::string_view run = chunk.substr(run_start, end - run_start);
        if (has_alnum(run)) out.push_back(fold_case(run));
        run_start = -1;
    };
    while (i < length) {
        int32_t at = i;
        UChar32 c;
        U8_NEXT(bytes, i, length, c);
        if (c >= 0 && is_token_char(c)) {
            if (run_start < 0) run_start = at;
        } else {
            flush(at);
        }
    }
    flush(length);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
    int32_t length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    int32_t chunk_start = -1;
    auto flush = [&](int32_t end) {
        if (chunk_start < 0) return;
        tokenize_chunk(text.substr(chunk_start, end - chunk_start), tokens);
        chunk_start = -1;
    };
    while (i < length) {
        int32_t at = i;
        UChar32 c;
        U8_NEXT(bytes, i, length, c);
        if (c < 0 || u_isUWhiteSpace(c)) {
            flush(at);
        } else if (chunk_start < 0) {
            chunk_start = at;
        }
    }
    flush(length);
    return tokens;
}

std::vector<std::pair<std::string, uint64_t>> word_frequency(
    const std::vector<TweetRecord>& records, size_t n) {
    if (n == 0) fail(ErrorCode::invalid_argument, "word_frequency needs n >= 1");
    std::unordered_map<std::string, uint64_t> counts;
    for (const auto& r : records)
        for (auto& token : tokenize(r.text)) ++counts[token];

    std::vector<std::pair<std::string, uint64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > n) ranked.resize(n);
    return ranked;
}

LanguageDistribution language_distribution(const std::vector<TweetRecord>& records) {
    LanguageDistribution dist;
    for (const auto& r : records) ++dist.counts[r.language_code];
    dist.distinct = dist.counts.size();
    return dist;
}

uint32_t percent_tenths(uint64_t numerator, uint64_t denominator) {
    if (denominator == 0) return 0;
    // round-half-down of numerator/denominator * 1000
    unsigned long long scaled = 2000ull * numerator + denominator - 1;
    return static_cast<uint32_t>(scaled / (2ull * denominator));
}

std::string format_tenths(uint32_t tenths) {
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

std::vector<NativeLanguageRow> native_language_table(
    const std::vector<TweetRecord>& records,
    const std::map<std::string, std::set<std::string>>& native_map,
    size_t top_countries) {
    auto counts = count_by_country(records);

    std::vector<const CountryStats*> located;
    for (const auto& [iso, stats] : counts)
        if (iso != kUnknownCountryKey) located.push_back(&stats);
    std::sort(located.begin(), located.end(), [](const auto* a, const auto* b) {
        if (a->tweet_count != b->tweet_count) return a->tweet_count > b->tweet_count;
        return a->country_iso < b->country_iso;
    });
    if (located.size() > top_countries) located.resize(top_countries);

    std::vector<NativeLanguageRow> rows;
    for (const CountryStats* stats : located) {
        auto it = native_map.find(stats->country_iso);
        if (it == native_map.end())
            fail(ErrorCode::invalid_argument,
                 "country missing from native-language map: " + stats->country_iso);
        NativeLanguageRow row;
        row.country_iso = stats->country_iso;
        row.native_languages.assign(it->second.begin(), it->second.end());
        row.total_tweets = stats->tweet_count;
        for (const auto& lang : it->second) {
            auto found = stats->per_language_counts.find(lang);
            if (found != stats->per_language_counts.end())
                row.tweets_in_native += found->second;
        }
        row.pct_native_tenths = percent_tenths(row.tweets_in_native, row.total_tweets);
        row.pct_other_tenths = 1000 - row.pct_native_tenths;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::map<std::string, std::set<std::string>> load_native_map(
    const std::filesystem::path& path) {
    static const std::vector<std::string> header = {"country_iso", "language_code"};
    auto rows = csv::read_file(path, 2, &header);
    std::map<std::string, std::set<std::string>> native;
    for (size_t i = 1; i < rows.size(); ++i) {
        std::string iso = rows[i][0];
        for (char& c : iso) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (iso.size() != 2 || rows[i][1].empty())
            fail(ErrorCode::parse, path.string() + ": row " + std::to_string(i + 1) +
                                       ": expected country_iso,language_code");
        native[iso].insert(rows[i][1]);
    }
    return native;
}

}  // namespace tweetpipe
