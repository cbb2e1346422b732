#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/record.hpp"

namespace tweetpipe {

struct GazetteerEntry {
    std::string pattern;  // stored in normalized form
    std::string country;
    std::optional<std::string> city;
    std::string country_iso;
};

struct LocationMatch {
    std::string country;
    std::optional<std::string> city;
    std::string country_iso;
    size_t matched_entry_id = 0;
};

struct ResolverMetrics {
    uint64_t total = 0;
    uint64_t resolved = 0;
    uint64_t unresolved = 0;
    std::optional<double> precision;  // set when labels were evaluated

    // 0 when total is 0.
    double detection_rate() const {
        return total ? static_cast<double>(resolved) / static_cast<double>(total) : 0.0;
    }
};

// Ordered pattern dictionary mapping free-text locations to countries.
// Entry order is significant: resolution returns the first entry whose
// pattern matches, so corrections are applied by prepending. A denylist of
// fictional places is checked before any entry.
class Gazetteer {
public:
    Gazetteer() = default;  // empty; resolves nothing

    // Both files are CSV with a header row; entries is
    // pattern,country,city,country_iso and the denylist a single pattern
    // column. The built-in fictional places are always denied.
    static Gazetteer load(const std::filesystem::path& entries_csv,
                          const std::filesystem::path& denylist_csv = {});

    static Gazetteer from_entries(std::vector<GazetteerEntry> entries,
                                  std::vector<std::string> extra_denylist = {});

    // New gazetteer with the patch entries prepended (patch wins first-match).
    Gazetteer refined(const std::filesystem::path& patch_csv) const;

    // First matching entry for the (normalized) location text, or nullopt.
    std::optional<LocationMatch> resolve(std::string_view raw_location) const;

    // Reference linear scan, bypassing the token index. Resolution results
    // must be identical; the index only narrows candidates.
    std::optional<LocationMatch> resolve_linear(std::string_view raw_location) const;

    size_t size() const { return entries_.size(); }
    const std::vector<GazetteerEntry>& entries() const { return entries_; }

private:
    void build_index();
    std::optional<LocationMatch> match_from(std::string_view normalized,
                                            const std::vector<size_t>& candidates) const;

    std::vector<GazetteerEntry> entries_;
    std::vector<std::string> denylist_;  // normalized patterns
    // First pattern token -> indices of entries starting with it.
    std::unordered_map<std::string, std::vector<size_t>> index_;
};

// Whole-word pattern occurrence over already-normalized text: `pattern`
// appears as a substring with no letter or digit adjacent on either side.
bool word_boundary_match(std::string_view pattern, std::string_view normalized_text);

// Fills detected_country/city/iso for every record the gazetteer resolves,
// leaving the rest untouched, and returns detection metrics. threads <= 1
// resolves on the calling thread.
ResolverMetrics resolve_all(std::vector<TweetRecord>& records, const Gazetteer& gaz,
                            int threads = 0);

// Distinct normalized raw_location values of unresolved records with their
// frequencies, most frequent first (ties by location ascending).
std::vector<std::pair<std::string, uint64_t>> unknown_report(
    const std::vector<TweetRecord>& records);

// Precision/detection metrics against hand labels (tweet_id -> country_iso).
// Labels naming a tweet_id absent from `records` are an error. Precision is
// the fraction of labeled resolved records whose country_iso matches.
ResolverMetrics evaluate_resolver(
    const std::vector<TweetRecord>& records,
    const std::unordered_map<std::string, std::string>& labels);

// Loads tweet_id,country_iso label CSV (header row required).
std::unordered_map<std::string, std::string> load_labels(
    const std::filesystem::path& path);

}  // namespace tweetpipe
