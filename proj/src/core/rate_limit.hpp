#pragma once

#include <chrono>
#include <cstdint>
#include <deque>

namespace tweetpipe {

struct RateLimitPolicy {
    uint32_t max_requests = 450;
    std::chrono::milliseconds window{std::chrono::minutes(15)};
    std::chrono::milliseconds poll_interval_min{500};
    std::chrono::milliseconds poll_interval_max{2000};

    void validate() const;  // throws Error(invalid_argument)
};

// At most max_requests may be recorded inside any sliding window. Pure
// bookkeeping over caller-supplied time points, so tests can drive it with
// synthetic clocks.
class SlidingWindowLimiter {
public:
    using TimePoint = std::chrono::steady_clock::time_point;

    SlidingWindowLimiter(uint32_t max_requests, std::chrono::milliseconds window)
        : max_requests_(max_requests), window_(window) {}

    // Zero when a request may be recorded at `now`, otherwise the wait
    // until the oldest in-window request expires.
    std::chrono::milliseconds delay_until_permit(TimePoint now);

    void record(TimePoint now);

private:
    void prune(TimePoint now);

    uint32_t max_requests_;
    std::chrono::milliseconds window_;
    std::deque<TimePoint> recorded_;
};

}  // namespace tweetpipe
