#include "core/rate_limit.hpp"

#include "core/errors.hpp"

namespace tweetpipe {

void RateLimitPolicy::validate() const {
    if (max_requests == 0)
        fail(ErrorCode::invalid_argument, "rate limit needs max_requests >= 1");
    if (window.count() <= 0)
        fail(ErrorCode::invalid_argument, "rate limit window must be positive");
    if (poll_interval_min.count() < 0 || poll_interval_max < poll_interval_min)
        fail(ErrorCode::invalid_argument,
             "poll interval bounds must satisfy 0 <= min <= max");
}

void SlidingWindowLimiter::prune(TimePoint now) {
    while (!recorded_.empty() && recorded_.front() + window_ <= now)
        recorded_.pop_front();
}

std::chrono::milliseconds SlidingWindowLimiter::delay_until_permit(TimePoint now) {
    prune(now);
    if (recorded_.size() < max_requests_) return std::chrono::milliseconds(0);
    auto ready = recorded_.front() + window_;
    return std::chrono::duration_cast<std::chrono::milliseconds>(ready - now) +
           std::chrono::milliseconds(1);
}

void SlidingWindowLimiter::record(TimePoint now) {
    prune(now);
    recorded_.push_back(now);
}

}  // namespace tweetpipe
