#include <doctest.h>

#include <random>

#include "core/analytics.hpp"
#include "core/errors.hpp"
#include "helpers.hpp"

using namespace tweetpipe;

namespace {

TweetRecord located(const std::string& id, const char* iso, const char* lang = "en",
                    bool retweet = false, const std::string& user = "someone") {
    auto r = testutil::make_record(id, "somewhere", lang);
    if (iso) {
        r.country_iso = iso;
        r.detected_country = std::string("Country-") + iso;
    }
    r.is_retweet = retweet;
    r.username = user;
    return r;
}

}  // namespace

TEST_SUITE("analytics") {

TEST_CASE("count_by_country buckets unresolved records separately") {
    std::vector<TweetRecord> records{
        located("1", "US"), located("2", "US"), located("3", "US", "es", true),
        located("4", "FR", "fr"), located("5", nullptr)};
    auto counts = count_by_country(records);
    REQUIRE(counts.size() == 3);
    CHECK(counts["US"].tweet_count == 3);
    CHECK(counts["US"].retweet_count == 1);
    CHECK(counts["US"].per_language_counts["en"] == 2);
    CHECK(counts["US"].per_language_counts["es"] == 1);
    CHECK(counts["FR"].tweet_count == 1);
    CHECK(counts[kUnknownCountryKey].tweet_count == 1);

    SUBCASE("empty input gives an empty map") {
        CHECK(count_by_country({}).empty());
    }
    SUBCASE("language counts sum to the tweet count") {
        for (const auto& [iso, stats] : counts) {
            uint64_t sum = 0;
            for (const auto& [lang, n] : stats.per_language_counts) sum += n;
            CHECK(sum == stats.tweet_count);
        }
    }
}

TEST_CASE("stats merging equals single-pass counting for any partition") {
    std::mt19937_64 rng(4);
    std::vector<TweetRecord> records;
    const char* isos[] = {"US", "FR", "BR", nullptr};
    const char* langs[] = {"en", "fr", "pt"};
    for (int i = 0; i < 800; ++i)
        records.push_back(located(std::to_string(i), isos[rng() % 4],
                                  langs[rng() % 3], rng() % 2));

    auto whole = count_by_country(records);
    for (int split_trial = 0; split_trial < 10; ++split_trial) {
        size_t cut1 = rng() % records.size();
        size_t cut2 = cut1 + rng() % (records.size() - cut1);
        std::vector<TweetRecord> a(records.begin(), records.begin() + cut1);
        std::vector<TweetRecord> b(records.begin() + cut1, records.begin() + cut2);
        std::vector<TweetRecord> c(records.begin() + cut2, records.end());
        auto ca = count_by_country(a);
        auto cb = count_by_country(b);
        auto cc = count_by_country(c);
        std::map<std::string, CountryStats> merged = ca;
        for (const auto& [iso, stats] : cb) {
            merged[iso].country_iso = iso;
            merged[iso].merge(stats);
        }
        for (const auto& [iso, stats] : cc) {
            merged[iso].country_iso = iso;
            merged[iso].merge(stats);
        }
        REQUIRE(merged.size() == whole.size());
        for (const auto& [iso, stats] : whole) {
            CHECK(merged[iso].tweet_count == stats.tweet_count);
            CHECK(merged[iso].retweet_count == stats.retweet_count);
            CHECK(merged[iso].per_language_counts == stats.per_language_counts);
        }
    }
}

TEST_CASE("bin boundaries are lower-inclusive and upper-exclusive") {
    BinScheme scheme = BinScheme::default_scheme();
    struct Case { uint64_t count; size_t bin; };
    // Hand-enumerated boundary table: x-1 and x for each threshold.
    const Case cases[] = {
        {0, 0},          {4'999, 0},      {5'000, 1},      {49'999, 1},
        {50'000, 2},     {99'999, 2},     {100'000, 3},    {499'999, 3},
        {500'000, 4},    {999'999, 4},    {1'000'000, 5},  {4'999'999, 5},
        {5'000'000, 6},  {9'999'999, 6},  {10'000'000, 7}, {12'299'716, 7},
    };
    for (const auto& c : cases) CHECK(scheme.bin_of(c.count) == c.bin);
}

TEST_CASE("bin_countries partitions every counted country exactly once") {
    std::mt19937_64 rng(12);
    std::map<std::string, CountryStats> counts;
    uint64_t located_total = 0;
    for (int i = 0; i < 120; ++i) {
        std::string iso = "A" + std::to_string(i);
        uint64_t n = rng() % 20'000'000;
        counts[iso].country_iso = iso;
        counts[iso].tweet_count = n;
        if (n > 0) located_total += n;
    }
    counts[kUnknownCountryKey].tweet_count = 999;  // must be excluded

    auto bins = bin_countries(counts, BinScheme::default_scheme());
    REQUIRE(bins.size() == 8);
    uint64_t bin_total = 0;
    size_t countries = 0;
    for (const auto& bin : bins) {
        bin_total += bin.total;
        countries += bin.countries.size();
        for (const auto& iso : bin.countries) CHECK(iso != kUnknownCountryKey);
    }
    CHECK(bin_total == located_total);
    size_t nonzero = 0;
    for (const auto& [iso, stats] : counts)
        if (iso != kUnknownCountryKey && stats.tweet_count > 0) ++nonzero;
    CHECK(countries == nonzero);
}

TEST_CASE("top_users ranks by count with alphabetical ties") {
    std::vector<TweetRecord> records;
    auto add = [&](const char* user, int originals, int retweets, const char* iso) {
        static int id = 0;
        for (int i = 0; i < originals; ++i)
            records.push_back(located("t" + std::to_string(id++), iso, "en", false, user));
        for (int i = 0; i < retweets; ++i)
            records.push_back(located("t" + std::to_string(id++), iso, "en", true, user));
    };
    add("ducosome", 9, 1, "JP");
    add("alpha", 5, 0, "US");
    add("brave", 5, 2, "US");
    add("carol", 2, 7, "GB");

    auto top = top_users(records, 10, TweetKind::original);
    REQUIRE(top.size() == 4);
    CHECK(top[0].username == "ducosome");
    CHECK(top[0].count == 9);
    CHECK(top[0].country_iso == "JP");
    CHECK(top[1].username == "alpha");  // 5-way tie broken alphabetically
    CHECK(top[2].username == "brave");
    CHECK(top[3].username == "carol");

    auto retweeters = top_users(records, 2, TweetKind::retweet);
    REQUIRE(retweeters.size() == 2);
    CHECK(retweeters[0].username == "carol");
    CHECK(retweeters[0].count == 7);
    CHECK(retweeters[1].username == "brave");

    SUBCASE("k larger than the distinct handles returns everything") {
        CHECK(top_users(records, 500, TweetKind::original).size() == 4);
    }
    SUBCASE("top-k is a prefix of top-(k+1)") {
        for (size_t k = 1; k < 4; ++k) {
            auto smaller = top_users(records, k, TweetKind::original);
            auto larger = top_users(records, k + 1, TweetKind::original);
            REQUIRE(smaller.size() == k);
            for (size_t i = 0; i < k; ++i)
                CHECK(smaller[i].username == larger[i].username);
        }
    }
    SUBCASE("modal country over a user's records breaks ties by ISO") {
        std::vector<TweetRecord> moving;
        moving.push_back(located("m1", "US", "en", false, "traveler"));
        moving.push_back(located("m2", "FR", "en", false, "traveler"));
        moving.push_back(located("m3", "FR", "en", false, "traveler"));
        auto t = top_users(moving, 1, TweetKind::original);
        CHECK(t[0].country_iso == "FR");

        std::vector<TweetRecord> tied;
        tied.push_back(located("m4", "US", "en", false, "split"));
        tied.push_back(located("m5", "FR", "en", false, "split"));
        auto t2 = top_users(tied, 1, TweetKind::original);
        CHECK(t2[0].country_iso == "FR");  // alphabetical among equals
    }
}

TEST_CASE("country_share_of_top reproduces the 21 percent arithmetic") {
    std::vector<HandleCount> top;
    for (int i = 0; i < 105; ++i)
        top.push_back({"us" + std::to_string(i), "US", 10, TweetKind::original});
    for (int i = 0; i < 395; ++i) {
        const char* iso = i % 2 ? "JP" : "BR";
        top.push_back({"x" + std::to_string(i), iso, 5, TweetKind::original});
    }
    REQUIRE(top.size() == 500);
    auto shares = country_share_of_top(top);
    REQUIRE(!shares.empty());
    // 198 BR, 197 JP, 105 US
    CHECK(shares[0].country_iso == "BR");
    bool found_us = false;
    for (const auto& share : shares) {
        if (share.country_iso == "US") {
            found_us = true;
            CHECK(share.handles == 105);
            CHECK(share.share_tenths == 210);
            CHECK(format_tenths(share.share_tenths) == "21.0");
        }
    }
    CHECK(found_us);

    SUBCASE("single-country list gets 100 percent") {
        std::vector<HandleCount> solo{{"a", "US", 3, TweetKind::original},
                                      {"b", "US", 2, TweetKind::original}};
        auto s = country_share_of_top(solo);
        REQUIRE(s.size() == 1);
        CHECK(s[0].share_tenths == 1000);
    }
    SUBCASE("handles with no country land in the unknown bucket") {
        std::vector<HandleCount> mixed{{"a", "US", 3, TweetKind::original},
                                       {"b", std::nullopt, 2, TweetKind::original}};
        auto s = country_share_of_top(mixed);
        REQUIRE(s.size() == 2);
        CHECK(s[0].share_tenths + s[1].share_tenths == 1000);
    }
    SUBCASE("empty list is an error") {
        CHECK_THROWS_AS(country_share_of_top({}), Error);
    }
}

TEST_CASE("tokenize") {
    CHECK(tokenize("Why y tho") == std::vector<std::string>{"why", "y", "tho"});
    CHECK(tokenize("100 % done - now") ==
          std::vector<std::string>{"100", "%", "done", "-", "now"});
    CHECK(tokenize("RT @user check https://x.co #news") ==
          std::vector<std::string>{"rt", "check", "news"});
    CHECK(tokenize("y'all don't KNOW") ==
          std::vector<std::string>{"y'all", "don't", "know"});
    CHECK(tokenize("punct!!! (wow)") == std::vector<std::string>{"punct", "wow"});
    CHECK(tokenize("http://a.b c WWW.d.e f") == std::vector<std::string>{"c", "f"});
    CHECK(tokenize("#Hashtag #ñandú") == std::vector<std::string>{"hashtag", "ñandú"});
    CHECK(tokenize("@only @mentions") == std::vector<std::string>{});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("-%") == std::vector<std::string>{});  // not standalone
    CHECK(tokenize("çÇ İ") == std::vector<std::string>{"çç", "i̇"});
}

TEST_CASE("word_frequency orders by count then token") {
    std::vector<TweetRecord> records;
    auto with_text = [&](const std::string& text) {
        auto r = testutil::make_record(std::to_string(records.size()));
        r.text = text;
        records.push_back(std::move(r));
    };
    with_text("a b a");
    with_text("b a");

    auto top = word_frequency(records, 10);
    REQUIRE(top.size() == 2);
    CHECK(top[0] == std::pair<std::string, uint64_t>{"a", 3});
    CHECK(top[1] == std::pair<std::string, uint64_t>{"b", 2});
    CHECK(word_frequency(records, 1) ==
          std::vector<std::pair<std::string, uint64_t>>{{"a", 3}});

    SUBCASE("record order never changes the counts") {
        std::mt19937_64 rng(5);
        auto shuffled = records;
        for (int t = 0; t < 5; ++t) {
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            CHECK(word_frequency(shuffled, 10) == top);
        }
    }
}

TEST_CASE("language_distribution") {
    std::vector<TweetRecord> records{located("1", "US", "en"), located("2", "US", "en"),
                                     located("3", "FR", "fr")};
    auto dist = language_distribution(records);
    CHECK(dist.counts == std::map<std::string, uint64_t>{{"en", 2}, {"fr", 1}});
    CHECK(dist.distinct == 2);
    CHECK(language_distribution({}).distinct == 0);
}

TEST_CASE("percent_tenths rounds halves down") {
    CHECK(percent_tenths(875, 1000) == 875);   // 87.5 exactly
    CHECK(percent_tenths(774, 800) == 967);    // 96.75 -> 96.7
    CHECK(percent_tenths(105, 500) == 210);    // 21.0
    CHECK(percent_tenths(2, 3) == 667);        // 66.66 -> 66.7
    CHECK(percent_tenths(1, 3) == 333);
    CHECK(percent_tenths(0, 5) == 0);
    CHECK(percent_tenths(5, 5) == 1000);
    CHECK(percent_tenths(1, 0) == 0);          // degenerate denominator
    CHECK(format_tenths(967) == "96.7");
    CHECK(format_tenths(1000) == "100.0");
}

TEST_CASE("native_language_table reproduces the share arithmetic") {
    std::map<std::string, std::set<std::string>> native_map{
        {"US", {"en"}}, {"CA", {"en", "fr"}}, {"BR", {"pt"}}};

    SUBCASE("single native language") {
        std::vector<TweetRecord> records;
        for (int i = 0; i < 875; ++i)
            records.push_back(located("u" + std::to_string(i), "US", "en"));
        for (int i = 0; i < 125; ++i)
            records.push_back(located("v" + std::to_string(i), "US", "es"));
        auto rows = native_language_table(records, native_map);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].country_iso == "US");
        CHECK(rows[0].total_tweets == 1000);
        CHECK(rows[0].tweets_in_native == 875);
        CHECK(format_tenths(rows[0].pct_native_tenths) == "87.5");
        CHECK(format_tenths(rows[0].pct_other_tenths) == "12.5");
    }
    SUBCASE("two native languages sum before the percentage") {
        std::vector<TweetRecord> records;
        for (int i = 0; i < 743; ++i)
            records.push_back(located("e" + std::to_string(i), "CA", "en"));
        for (int i = 0; i < 31; ++i)
            records.push_back(located("f" + std::to_string(i), "CA", "fr"));
        for (int i = 0; i < 26; ++i)
            records.push_back(located("o" + std::to_string(i), "CA", "zh"));
        REQUIRE(records.size() == 800);
        auto rows = native_language_table(records, native_map);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].tweets_in_native == 774);
        CHECK(format_tenths(rows[0].pct_native_tenths) == "96.7");
        CHECK(format_tenths(rows[0].pct_other_tenths) == "3.3");
    }
    SUBCASE("all tweets native gives 100.0 and 0.0") {
        std::vector<TweetRecord> records{located("1", "BR", "pt"),
                                         located("2", "BR", "pt")};
        auto rows = native_language_table(records, native_map);
        CHECK(format_tenths(rows[0].pct_native_tenths) == "100.0");
        CHECK(format_tenths(rows[0].pct_other_tenths) == "0.0");
    }
    SUBCASE("top-10 cut by tweet volume") {
        std::vector<TweetRecord> records;
        std::map<std::string, std::set<std::string>> many;
        for (int c = 0; c < 12; ++c) {
            std::string iso = std::string(1, 'A' + c) + "X";
            many[iso] = {"en"};
            for (int i = 0; i <= c; ++i)
                records.push_back(located(iso + std::to_string(i), iso.c_str(), "en"));
        }
        auto rows = native_language_table(records, many);
        REQUIRE(rows.size() == 10);
        CHECK(rows[0].total_tweets == 12);  // the biggest country first
        CHECK(rows[9].total_tweets == 3);
    }
    SUBCASE("country missing from the map is an error naming it") {
        std::vector<TweetRecord> records{located("1", "ZZ", "xx")};
        CHECK_THROWS_WITH_AS(native_language_table(records, native_map),
                             doctest::Contains("ZZ"), Error);
    }
}

}  // TEST_SUITE
