#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tweetpipe {

// An ordered ranking: the item at position p holds rank p+1. Item ids are
// unique; ranks are dense 1..size().
class RankedList {
public:
    RankedList() = default;
    static RankedList from_items(std::vector<std::string> items);

    size_t size() const { return items_.size(); }
    const std::vector<std::string>& items() const { return items_; }

    // 1-based rank, or nullopt when the item is absent.
    std::optional<size_t> rank_of(const std::string& item) const;

private:
    std::vector<std::string> items_;
    std::map<std::string, size_t> ranks_;
};

// Reference ranking of length n matched against a comparison ranking of
// length m. v[i] is the comparison rank of reference item i+1; items absent
// from the comparison carry the placeholder rank (m+1 unless overridden).
struct PartialRankPair {
    std::vector<int64_t> v;
    size_t n = 0;
    size_t m = 0;
};

PartialRankPair build_pair(const RankedList& reference, const RankedList& comparison,
                           std::optional<int64_t> placeholder = std::nullopt);

struct MsrcOptions {
    // Scale the displacement sum by 6; on full lists this reduces to the
    // textbook Spearman coefficient.
    bool classic_factor = false;
    // Let placeholder ranks participate in the denominator's max term
    // instead of capping it at m.
    bool placeholder_in_max = false;
};

// Modified Spearman rank-order correlation for partial lists:
//   1 - sum_i (i - v_i)^2 / (m * (maxv^2 - 1))
// computed over exact integer sums with a single final division. A zero
// displacement sum is exactly 1.0; a zero denominator with a nonzero
// displacement sum throws Error(domain).
double msrc(const PartialRankPair& pair, const MsrcOptions& options = {});
double msrc_from_ranks(std::span<const int64_t> v, size_t m,
                       const MsrcOptions& options = {});

// Textbook Spearman coefficient 1 - 6*sum(d^2)/(n(n^2-1)) over two complete
// rankings of the same item set. Throws Error(invalid_argument) when the
// item sets differ.
double spearman_classic(const RankedList& a, const RankedList& b);

// Kendall tau (concordant - discordant) / (n(n-1)/2) over two complete
// rankings of the same item set, via inversion counting.
double kendall_tau(const RankedList& a, const RankedList& b);

// ------------------------------------------------------------------ HDI ---

enum class HdiCategory { very_high, high, medium, low };

const char* hdi_category_name(HdiCategory category);
std::optional<HdiCategory> hdi_category_from_name(const std::string& name);

struct HdiFixture {
    HdiCategory category;
    RankedList countries;  // exactly 20 ISO codes in reference order
};

// Loads country_iso,category,un_rank (header row required): four categories
// of exactly 20 countries each, ordered by un_rank within the category.
std::vector<HdiFixture> load_hdi_fixtures(const std::filesystem::path& path);

struct CategoryCorrelation {
    HdiCategory category;
    double rs_prime = 0.0;
    size_t n = 0;
    size_t m = 0;
    struct Point {
        std::string country_iso;
        size_t reference_rank;  // 1..n position in the fixture
        int64_t tweet_rank;     // comparison rank, placeholder when absent
    };
    std::vector<Point> scatter;
};

// For each category: reference = the fixture's countries, comparison = the
// same countries re-ranked by descending tweet count (zero-tweet countries
// absent, ties broken by ISO code ascending). Results in fixed category
// order very_high, high, medium, low.
std::vector<CategoryCorrelation> hdi_experiment(
    const std::map<std::string, uint64_t>& tweet_counts,
    const std::vector<HdiFixture>& fixtures, const MsrcOptions& options = {});

}  // namespace tweetpipe
