#include "core/rankcorr.hpp"

#include <algorithm>
#include <array>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace tweetpipe {

RankedList RankedList::from_items(std::vector<std::string> items) {
    RankedList list;
    for (size_t i = 0; i < items.size(); ++i) {
        auto [it, inserted] = list.ranks_.emplace(items[i], i + 1);
        if (!inserted)
            fail(ErrorCode::invalid_argument,
                 "duplicate item in ranked list: " + items[i]);
    }
    list.items_ = std::move(items);
    return list;
}

std::optional<size_t> RankedList::rank_of(const std::string& item) const {
    auto it = ranks_.find(item);
    if (it == ranks_.end()) return std::nullopt;
    return it->second;
}

PartialRankPair build_pair(const RankedList& reference, const RankedList& comparison,
                           std::optional<int64_t> placeholder) {
    if (reference.size() == 0 || comparison.size() == 0)
        fail(ErrorCode::invalid_argument, "ranked lists must be non-empty");

    PartialRankPair pair;
    pair.n = reference.size();
    pair.m = comparison.size();
    int64_t missing = placeholder.value_or(static_cast<int64_t>(pair.m) + 1);
    pair.v.reserve(pair.n);
    for (const auto& item : reference.items()) {
        auto rank = comparison.rank_of(item);
        pair.v.push_back(rank ? static_cast<int64_t>(*rank) : missing);
    }
    return pair;
}

double msrc_from_ranks(std::span<const int64_t> v, size_t m,
                       const MsrcOptions& options) {
    if (v.empty()) fail(ErrorCode::invalid_argument, "empty rank vector");
    if (m == 0) fail(ErrorCode::invalid_argument, "comparison length must be >= 1");

    // 128-bit accumulation: exact integer sums for any ranks the C surface
    // can pass, with a single division at the end.
    unsigned __int128 sum_sq = 0;
    int64_t max_v = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i] < 1) fail(ErrorCode::invalid_argument, "ranks must be >= 1");
        unsigned __int128 diff = v[i] > static_cast<int64_t>(i + 1)
                                     ? static_cast<unsigned __int128>(v[i] - static_cast<int64_t>(i + 1))
                                     : static_cast<unsigned __int128>(static_cast<int64_t>(i + 1) - v[i]);
        sum_sq += diff * diff;
        max_v = std::max(max_v, v[i]);
    }
    if (sum_sq == 0) return 1.0;

    unsigned __int128 maxv = options.placeholder_in_max
                                 ? std::max<unsigned long long>(m, max_v)
                                 : m;
    unsigned __int128 denom = static_cast<unsigned __int128>(m) * (maxv * maxv - 1);
    if (denom == 0)
        fail(ErrorCode::domain, "degenerate denominator: comparison max rank is 1");
    unsigned __int128 numerator = (options.classic_factor ? 6u : 1u) * sum_sq;
    return 1.0 - static_cast<double>(numerator) / static_cast<double>(denom);
}

double msrc(const PartialRankPair& pair, const MsrcOptions& options) {
    if (pair.v.size() != pair.n)
        fail(ErrorCode::invalid_argument, "rank vector length does not match n");
    return msrc_from_ranks(pair.v, pair.m, options);
}

namespace {

// Rank vectors aligned by item; throws when the item sets differ.
std::pair<std::vector<int64_t>, std::vector<int64_t>> aligned_ranks(
    const RankedList& a, const RankedList& b) {
    if (a.size() != b.size())
        fail(ErrorCode::invalid_argument, "rankings have different lengths");
    std::vector<int64_t> ra, rb;
    ra.reserve(a.size());
    rb.reserve(a.size());
    for (const auto& item : a.items()) {
        auto rank = b.rank_of(item);
        if (!rank)
            fail(ErrorCode::invalid_argument,
                 "item missing from second ranking: " + item);
        ra.push_back(static_cast<int64_t>(*a.rank_of(item)));
        rb.push_back(static_cast<int64_t>(*rank));
    }
    return {std::move(ra), std::move(rb)};
}

uint64_t count_inversions(std::vector<int64_t>& values) {
    // Bottom-up merge sort, counting crossed pairs.
    size_t n = values.size();
    std::vector<int64_t> buffer(n);
    uint64_t inversions = 0;
    for (size_t width = 1; width < n; width *= 2) {
        for (size_t lo = 0; lo + width < n; lo += 2 * width) {
            size_t mid = lo + width;
            size_t hi = std::min(mid + width, n);
            size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (values[i] <= values[j]) {
                    buffer[k++] = values[i++];
                } else {
                    inversions += mid - i;
                    buffer[k++] = values[j++];
                }
            }
            while (i < mid) buffer[k++] = values[i++];
            while (j < hi) buffer[k++] = values[j++];
            std::copy(buffer.begin() + lo, buffer.begin() + hi, values.begin() + lo);
        }
    }
    return inversions;
}

}  // namespace

double spearman_classic(const RankedList& a, const RankedList& b) {
    auto [ra, rb] = aligned_ranks(a, b);
    unsigned __int128 sum_sq = 0;
    for (size_t i = 0; i < ra.size(); ++i) {
        unsigned __int128 d = ra[i] > rb[i] ? ra[i] - rb[i] : rb[i] - ra[i];
        sum_sq += d * d;
    }
    if (sum_sq == 0) return 1.0;
    unsigned __int128 n = ra.size();
    return 1.0 - 6.0 * static_cast<double>(sum_sq) /
                     static_cast<double>(n * (n * n - 1));
}

double kendall_tau(const RankedList& a, const RankedList& b) {
    auto [ra, rb] = aligned_ranks(a, b);
    size_t n = ra.size();
    if (n < 2) return 1.0;

    // Order by the first ranking, then count inversions in the second.
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t x, size_t y) { return ra[x] < ra[y]; });
    std::vector<int64_t> sequence(n);
    for (size_t i = 0; i < n; ++i) sequence[i] = rb[order[i]];

    uint64_t inversions = count_inversions(sequence);
    uint64_t pairs = static_cast<uint64_t>(n) * (n - 1) / 2;
    return (static_cast<double>(pairs) - 2.0 * static_cast<double>(inversions)) /
           static_cast<double>(pairs);
}

// ------------------------------------------------------------------ HDI ---

const char* hdi_category_name(HdiCategory category) {
    switch (category) {
        case HdiCategory::very_high: return "very_high";
        case HdiCategory::high: return "high";
        case HdiCategory::medium: return "medium";
        case HdiCategory::low: return "low";
    }
    return "?";
}

std::optional<HdiCategory> hdi_category_from_name(const std::string& name) {
    if (name == "very_high") return HdiCategory::very_high;
    if (name == "high") return HdiCategory::high;
    if (name == "medium") return HdiCategory::medium;
    if (name == "low") return HdiCategory::low;
    return std::nullopt;
}

std::vector<HdiFixture> load_hdi_fixtures(const std::filesystem::path& path) {
    static const std::vector<std::string> header = {"country_iso", "category",
                                                    "un_rank"};
    auto rows = csv::read_file(path, 3, &header);

    std::array<std::vector<std::pair<int, std::string>>, 4> buckets;
    for (size_t i = 1; i < rows.size(); ++i) {
        uint64_t row_number = i + 1;
        auto category = hdi_category_from_name(rows[i][1]);
        if (!category)
            fail(ErrorCode::parse, path.string() + ": row " +
                                       std::to_string(row_number) +
                                       ": unknown category \"" + rows[i][1] + "\"");
        int rank = 0;
        try {
            rank = std::stoi(rows[i][2]);
        } catch (const std::exception&) {
            rank = 0;
        }
        if (rank < 1)
            fail(ErrorCode::parse, path.string() + ": row " +
                                       std::to_string(row_number) +
                                       ": un_rank must be a positive integer");
        buckets[static_cast<size_t>(*category)].emplace_back(rank, rows[i][0]);
    }

    std::vector<HdiFixture> fixtures;
    for (auto category : {HdiCategory::very_high, HdiCategory::high,
                          HdiCategory::medium, HdiCategory::low}) {
        auto& bucket = buckets[static_cast<size_t>(category)];
        if (bucket.empty())
            fail(ErrorCode::parse, path.string() + ": missing category " +
                                       hdi_category_name(category));
        if (bucket.size() != 20)
            fail(ErrorCode::parse,
                 path.string() + ": category " + hdi_category_name(category) +
                     " has " + std::to_string(bucket.size()) + " entries, expected 20");
        std::sort(bucket.begin(), bucket.end());
        for (size_t i = 1; i < bucket.size(); ++i)
            if (bucket[i].first == bucket[i - 1].first)
                fail(ErrorCode::parse,
                     path.string() + ": category " + hdi_category_name(category) +
                         " has duplicate un_rank " + std::to_string(bucket[i].first));
        std::vector<std::string> items;
        for (auto& [rank, iso] : bucket) items.push_back(iso);
        fixtures.push_back({category, RankedList::from_items(std::move(items))});
    }
    return fixtures;
}

std::vector<CategoryCorrelation> hdi_experiment(
    const std::map<std::string, uint64_t>& tweet_counts,
    const std::vector<HdiFixture>& fixtures, const MsrcOptions& options) {
    std::vector<CategoryCorrelation> results;
    for (auto category : {HdiCategory::very_high, HdiCategory::high,
                          HdiCategory::medium, HdiCategory::low}) {
        const HdiFixture* fixture = nullptr;
        for (const auto& f : fixtures)
            if (f.category == category) fixture = &f;
        if (!fixture)
            fail(ErrorCode::invalid_argument,
                 std::string("missing fixture for category ") +
                     hdi_category_name(category));

        // Re-rank the fixture's countries by tweet volume; countries with
        // no tweets drop out of the comparison list.
        std::vector<std::pair<uint64_t, std::string>> counted;
        for (const auto& iso : fixture->countries.items()) {
            auto it = tweet_counts.find(iso);
            if (it != tweet_counts.end() && it->second > 0)
                counted.emplace_back(it->second, iso);
        }
        if (counted.empty())
            fail(ErrorCode::domain,
                 std::string("no tweets for any country in category ") +
                     hdi_category_name(category));
        std::sort(counted.begin(), counted.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::vector<std::string> comparison_items;
        for (auto& [count, iso] : counted) comparison_items.push_back(iso);
        RankedList comparison = RankedList::from_items(std::move(comparison_items));

        PartialRankPair pair = build_pair(fixture->countries, comparison);
        CategoryCorrelation result;
        result.category = category;
        result.rs_prime = msrc(pair, options);
        result.n = pair.n;
        result.m = pair.m;
        for (size_t i = 0; i < pair.n; ++i)
            result.scatter.push_back(
                {fixture->countries.items()[i], i + 1, pair.v[i]});
        results.push_back(std::move(result));
    }
    return results;
}

}  // namespace tweetpipe
