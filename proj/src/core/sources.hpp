#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "core/rate_limit.hpp"

namespace tweetpipe {

using LineSink = std::function<void(std::string&&)>;

// Streams a file line by line (constant memory) into the sink. Returns the
// number of lines forwarded. Throws Error(io) if the file cannot be opened
// or reading fails mid-stream; the message carries the partial line count.
uint64_t replay_source(const std::filesystem::path& path, const LineSink& sink);

struct PollStats {
    uint64_t requests = 0;       // attempts actually sent
    uint64_t http_errors = 0;    // non-2xx responses
    uint64_t network_errors = 0; // transport failures
    uint64_t retries = 0;        // re-attempts after a failure
    uint64_t lines = 0;
    // Send time of every attempt, for rate-conformance checks.
    std::vector<std::chrono::steady_clock::time_point> request_times;
};

// Polls an HTTP endpoint for `duration`, forwarding each response body line
// by line. Successive attempts are separated by a uniform draw from
// [poll_interval_min, poll_interval_max] and never exceed max_requests per
// sliding window. A failed attempt is retried up to twice more with
// exponential backoff starting at one second, then polling continues.
// seed 0 draws the jitter seed from the system.
PollStats poll_source(const std::string& endpoint, const RateLimitPolicy& policy,
                      std::chrono::milliseconds duration, const LineSink& sink,
                      uint64_t seed = 0);

}  // namespace tweetpipe
