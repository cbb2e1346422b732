#include "core/gazetteer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <thread>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/textnorm.hpp"

namespace tweetpipe {

namespace {

const std::vector<std::string> kEntriesHeader = {"pattern", "country", "city",
                                                 "country_iso"};
const std::vector<std::string> kDenylistHeader = {"pattern"};
const std::vector<std::string> kLabelsHeader = {"tweet_id", "country_iso"};

const char* kBuiltinDenylist[] = {"Konoha", "Gotham City", "Hueco Mundo", "Asgard"};

bool valid_iso(const std::string& iso) {
    return iso.size() == 2 && std::isalpha(static_cast<unsigned char>(iso[0])) &&
           std::isalpha(static_cast<unsigned char>(iso[1]));
}

std::string upper_ascii(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

// First maximal run of word characters in a normalized pattern. Used as the
// index key; a matching text always contains this run as a complete token.
std::string first_token(std::string_view pattern) {
    size_t begin = 0;
    while (begin < pattern.size() && !word_char_at(pattern, begin)) ++begin;
    size_t end = begin;
    while (end < pattern.size() && word_char_at(pattern, end)) {
        ++end;
        while (end < pattern.size() && (pattern[end] & 0xC0) == 0x80) ++end;
    }
    return std::string(pattern.substr(begin, end - begin));
}

std::vector<GazetteerEntry> load_entry_file(const std::filesystem::path& path) {
    auto rows = csv::read_file(path, 4, &kEntriesHeader);
    std::vector<GazetteerEntry> entries;
    entries.reserve(rows.size());
    std::unordered_map<std::string, uint64_t> seen_patterns;

    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        uint64_t row_number = i + 1;
        GazetteerEntry entry;
        entry.pattern = normalize_diacritics(row[0]);
        entry.country = row[1];
        if (!row[2].empty()) entry.city = row[2];
        entry.country_iso = upper_ascii(row[3]);

        if (entry.pattern.empty() || first_token(entry.pattern).empty())
            fail(ErrorCode::parse, path.string() + ": row " +
                                       std::to_string(row_number) +
                                       ": pattern has no matchable word");
        if (entry.country.empty())
            fail(ErrorCode::parse, path.string() + ": row " +
                                       std::to_string(row_number) + ": empty country");
        if (!valid_iso(entry.country_iso))
            fail(ErrorCode::parse, path.string() + ": row " +
                                       std::to_string(row_number) +
                                       ": malformed ISO code \"" + row[3] + "\"");
        auto [it, inserted] = seen_patterns.emplace(entry.pattern, row_number);
        if (!inserted)
            fail(ErrorCode::parse, path.string() + ": row " +
                                       std::to_string(row_number) +
                                       ": duplicate pattern \"" + entry.pattern +
                                       "\" (first at row " + std::to_string(it->second) +
                                       ")");
        entries.push_back(std::move(entry));
    }
    return entries;
}

}  // namespace

bool word_boundary_match(std::string_view pattern, std::string_view text) {
    if (pattern.empty() || pattern.size() > text.size()) return false;
    size_t pos = 0;
    while ((pos = text.find(pattern, pos)) != std::string_view::npos) {
        bool left_ok = !word_char_at(pattern, 0) || !word_char_before(text, pos);
        size_t end = pos + pattern.size();
        bool right_ok = !word_char_before(pattern, pattern.size()) || !word_char_at(text, end);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

Gazetteer Gazetteer::load(const std::filesystem::path& entries_csv,
                          const std::filesystem::path& denylist_csv) {
    Gazetteer gaz;
    gaz.entries_ = load_entry_file(entries_csv);
    for (const char* place : kBuiltinDenylist)
        gaz.denylist_.push_back(normalize_diacritics(place));
    if (!denylist_csv.empty()) {
        auto rows = csv::read_file(denylist_csv, 1, &kDenylistHeader);
        for (size_t i = 1; i < rows.size(); ++i) {
            std::string pattern = normalize_diacritics(rows[i][0]);
            if (pattern.empty())
                fail(ErrorCode::parse, denylist_csv.string() + ": row " +
                                           std::to_string(i + 1) + ": empty pattern");
            gaz.denylist_.push_back(std::move(pattern));
        }
    }
    gaz.build_index();
    return gaz;
}

Gazetteer Gazetteer::from_entries(std::vector<GazetteerEntry> entries,
                                  std::vector<std::string> extra_denylist) {
    Gazetteer gaz;
    gaz.entries_ = std::move(entries);
    for (auto& e : gaz.entries_) {
        e.pattern = normalize_diacritics(e.pattern);
        e.country_iso = upper_ascii(e.country_iso);
    }
    for (const char* place : kBuiltinDenylist)
        gaz.denylist_.push_back(normalize_diacritics(place));
    for (auto& place : extra_denylist)
        gaz.denylist_.push_back(normalize_diacritics(place));
    gaz.build_index();
    return gaz;
}

Gazetteer Gazetteer::refined(const std::filesystem::path& patch_csv) const {
    std::vector<GazetteerEntry> patch = load_entry_file(patch_csv);
    Gazetteer gaz;
    gaz.entries_ = std::move(patch);
    gaz.entries_.insert(gaz.entries_.end(), entries_.begin(), entries_.end());
    gaz.denylist_ = denylist_;
    gaz.build_index();
    return gaz;
}

void Gazetteer::build_index() {
    index_.clear();
    for (size_t i = 0; i < entries_.size(); ++i)
        index_[first_token(entries_[i].pattern)].push_back(i);
}

std::optional<LocationMatch> Gazetteer::match_from(
    std::string_view normalized, const std::vector<size_t>& candidates) const {
    for (size_t id : candidates) {
        const GazetteerEntry& entry = entries_[id];
        if (word_boundary_match(entry.pattern, normalized))
            return LocationMatch{entry.country, entry.city, entry.country_iso, id};
    }
    return std::nullopt;
}

std::optional<LocationMatch> Gazetteer::resolve(std::string_view raw_location) const {
    std::string normalized = normalize_diacritics(raw_location);
    if (normalized.empty()) return std::nullopt;
    for (const std::string& denied : denylist_)
        if (word_boundary_match(denied, normalized)) return std::nullopt;

    // Collect entry candidates from the text's word tokens, then test them
    // in entry order so first-match semantics are preserved.
    std::vector<size_t> candidates;
    size_t i = 0;
    while (i < normalized.size()) {
        while (i < normalized.size() && !word_char_at(normalized, i)) ++i;
        size_t begin = i;
        while (i < normalized.size() && word_char_at(normalized, i)) {
            ++i;
            while (i < normalized.size() && (normalized[i] & 0xC0) == 0x80) ++i;
        }
        if (i > begin) {
            auto it = index_.find(normalized.substr(begin, i - begin));
            if (it != index_.end())
                candidates.insert(candidates.end(), it->second.begin(), it->second.end());
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    return match_from(normalized, candidates);
}

std::optional<LocationMatch> Gazetteer::resolve_linear(
    std::string_view raw_location) const {
    std::string normalized = normalize_diacritics(raw_location);
    if (normalized.empty()) return std::nullopt;
    for (const std::string& denied : denylist_)
        if (word_boundary_match(denied, normalized)) return std::nullopt;
    for (size_t id = 0; id < entries_.size(); ++id) {
        const GazetteerEntry& entry = entries_[id];
        if (word_boundary_match(entry.pattern, normalized))
            return LocationMatch{entry.country, entry.city, entry.country_iso, id};
    }
    return std::nullopt;
}

namespace {

void resolve_range(std::vector<TweetRecord>& records, size_t begin, size_t end,
                   const Gazetteer& gaz, uint64_t& resolved) {
    for (size_t i = begin; i < end; ++i) {
        if (auto match = gaz.resolve(records[i].raw_location)) {
            records[i].detected_country = match->country;
            records[i].detected_city = match->city;
            records[i].country_iso = match->country_iso;
            ++resolved;
        }
    }
}

}  // namespace

ResolverMetrics resolve_all(std::vector<TweetRecord>& records, const Gazetteer& gaz,
                            int threads) {
    ResolverMetrics metrics;
    metrics.total = records.size();

    size_t workers = threads > 1 ? static_cast<size_t>(threads) : 1;
    workers = std::min(workers, std::max<size_t>(records.size(), 1));
    if (workers <= 1) {
        resolve_range(records, 0, records.size(), gaz, metrics.resolved);
    } else {
        std::vector<uint64_t> counts(workers, 0);
        std::vector<std::thread> pool;
        size_t chunk = (records.size() + workers - 1) / workers;
        for (size_t w = 0; w < workers; ++w) {
            size_t begin = w * chunk;
            size_t end = std::min(records.size(), begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                resolve_range(records, begin, end, gaz, counts[w]);
            });
        }
        for (auto& t : pool) t.join();
        for (uint64_t c : counts) metrics.resolved += c;
    }
    metrics.unresolved = metrics.total - metrics.resolved;
    return metrics;
}

std::vector<std::pair<std::string, uint64_t>> unknown_report(
    const std::vector<TweetRecord>& records) {
    std::map<std::string, uint64_t> counts;
    for (const auto& r : records)
        if (!r.detected_country) ++counts[normalize_diacritics(r.raw_location)];

    std::vector<std::pair<std::string, uint64_t>> report(counts.begin(), counts.end());
    std::stable_sort(report.begin(), report.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return report;
}

ResolverMetrics evaluate_resolver(
    const std::vector<TweetRecord>& records,
    const std::unordered_map<std::string, std::string>& labels) {
    std::unordered_map<std::string, const TweetRecord*> by_id;
    by_id.reserve(records.size());
    for (const auto& r : records) by_id.emplace(r.tweet_id, &r);
    for (const auto& [id, iso] : labels) {
        (void)iso;
        if (!by_id.count(id))
            fail(ErrorCode::invalid_argument, "label for unknown record id: " + id);
    }

    ResolverMetrics metrics;
    metrics.total = records.size();
    uint64_t labeled_resolved = 0;
    uint64_t correct = 0;
    for (const auto& r : records) {
        if (!r.country_iso) continue;
        ++metrics.resolved;
        auto it = labels.find(r.tweet_id);
        if (it == labels.end()) continue;
        ++labeled_resolved;
        if (*r.country_iso == it->second) ++correct;
    }
    metrics.unresolved = metrics.total - metrics.resolved;
    if (labeled_resolved)
        metrics.precision = static_cast<double>(correct) / static_cast<double>(labeled_resolved);
    else if (metrics.resolved == 0)
        metrics.precision = 0.0;
    return metrics;
}

std::unordered_map<std::string, std::string> load_labels(
    const std::filesystem::path& path) {
    auto rows = csv::read_file(path, 2, &kLabelsHeader);
    std::unordered_map<std::string, std::string> labels;
    for (size_t i = 1; i < rows.size(); ++i) {
        if (rows[i][0].empty())
            fail(ErrorCode::parse,
                 path.string() + ": row " + std::to_string(i + 1) + ": empty tweet_id");
        labels[rows[i][0]] = upper_ascii(rows[i][1]);
    }
    return labels;
}

}  // namespace tweetpipe
