#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "core/record.hpp"

namespace tweetpipe {

struct DedupeConfig {
    // Maximum number of tweet ids (or id/index pairs) held in memory. Once
    // exceeded, records are spooled to disk and duplicates are found with
    // sorted runs and a merge pass.
    uint64_t memory_bound = 1'000'000;
    // Directory for spill files; empty selects the system temp directory.
    std::filesystem::path spill_dir;
};

// Order-preserving duplicate removal keyed on tweet_id: the first occurrence
// of each id is forwarded to the sink in stream order, later occurrences are
// dropped and counted. While distinct ids fit under the memory bound the
// stage is fully streaming; past the bound it buffers to disk and emits the
// remainder during finish().
class Deduper {
public:
    Deduper(DedupeConfig config, std::function<void(TweetRecord&&)> sink);
    ~Deduper();

    Deduper(const Deduper&) = delete;
    Deduper& operator=(const Deduper&) = delete;

    void push(TweetRecord&& record);

    // Flushes spilled state and returns the number of duplicates removed.
    uint64_t finish();

    bool spilled() const { return spilled_; }

private:
    void begin_spill();
    void flush_pair_batch();
    void write_run(const std::vector<std::pair<std::string, uint64_t>>& pairs);
    std::vector<std::filesystem::path> merge_runs(
        std::vector<std::filesystem::path> runs, size_t fan_in);
    uint64_t write_survivor_runs();
    void replay_spool();

    DedupeConfig config_;
    std::function<void(TweetRecord&&)> sink_;
    std::unordered_set<std::string> seen_;
    uint64_t duplicates_ = 0;
    bool spilled_ = false;
    bool finished_ = false;

    std::filesystem::path work_dir_;
    std::ofstream spool_;
    uint64_t spooled_ = 0;
    std::vector<std::pair<std::string, uint64_t>> pair_batch_;
    std::vector<std::filesystem::path> runs_;
    std::vector<std::filesystem::path> index_runs_;
};

// Convenience wrapper: dedupe a whole vector, returning the survivors in
// stream order and the number of duplicates removed.
std::pair<std::vector<TweetRecord>, uint64_t> dedupe(std::vector<TweetRecord> records,
                                                     DedupeConfig config = {});

}  // namespace tweetpipe
