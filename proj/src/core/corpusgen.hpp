#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "core/ingest.hpp"

namespace tweetpipe {

struct CorpusOptions {
    uint64_t seed = 1;
    uint64_t count = 10'000;    // lines emitted, duplicates included
    uint64_t duplicates = 0;    // exact number of re-emitted earlier lines

    double missing_location_rate = 0.08;
    double missing_language_rate = 0.03;
    double undetermined_language_rate = 0.03;
    double fictional_location_rate = 0.02;
    double unknown_location_rate = 0.05;
    double malformed_rate = 0.01;
    double retweet_rate = 0.35;

    static CorpusOptions clean(uint64_t seed, uint64_t count, uint64_t duplicates) {
        CorpusOptions opts;
        opts.seed = seed;
        opts.count = count;
        opts.duplicates = duplicates;
        opts.missing_location_rate = 0;
        opts.missing_language_rate = 0;
        opts.undetermined_language_rate = 0;
        opts.fictional_location_rate = 0;
        opts.unknown_location_rate = 0;
        opts.malformed_rate = 0;
        return opts;
    }
};

// What the generator knows it wrote, for oracle-style assertions.
struct CorpusTruth {
    IngestStats expected_stats;  // parse + filter + dedupe outcome
    // Kept records by home country of a resolvable location.
    std::map<std::string, uint64_t> country_counts;
    uint64_t unresolvable_kept = 0;  // kept records with fictional/unknown locations
    std::map<std::string, uint64_t> language_counts;  // over kept records
    std::map<std::string, uint64_t> token_counts;     // over kept records' texts
    std::map<std::string, uint64_t> retweets_by_country;
};

// Emits `count` JSON lines. Deterministic for a given options struct: the
// same seed yields the same bytes on every run.
CorpusTruth generate_corpus(const CorpusOptions& options,
                            const std::function<void(std::string&&)>& line_sink);

CorpusTruth generate_corpus_file(const CorpusOptions& options,
                                 const std::filesystem::path& out_path);

struct CorpusLocationPool {
    std::string country_iso;
    std::string language;  // primary language drawn for this country
    std::vector<std::string> locations;
};

// The location strings the generator draws from, all of which the bundled
// gazetteer must resolve to the pool's country.
const std::vector<CorpusLocationPool>& corpus_location_pools();

// The 64 language codes the generator cycles through.
const std::vector<std::string>& corpus_language_codes();

}  // namespace tweetpipe
