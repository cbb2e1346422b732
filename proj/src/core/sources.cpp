#include "core/sources.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include <httplib.h>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace tweetpipe {

uint64_t replay_source(const std::filesystem::path& path, const LineSink& sink) {
    std::ifstream in = csv::open_input(path);
    std::string line;
    uint64_t count = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        sink(std::move(line));
        line.clear();
        ++count;
    }
    if (in.bad())
        fail(ErrorCode::io, "read failed on " + path.string() + " after " +
                                std::to_string(count) + " lines");
    return count;
}

namespace {

constexpr int kMaxAttempts = 3;
constexpr std::chrono::milliseconds kBackoffStart{1000};

struct Endpoint {
    std::string base;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        fail(ErrorCode::invalid_argument, "endpoint must be an http URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

void forward_lines(const std::string& body, const LineSink& sink, uint64_t& lines) {
    size_t pos = 0;
    while (pos < body.size()) {
        size_t end = body.find('\n', pos);
        size_t len = (end == std::string::npos ? body.size() : end) - pos;
        std::string line = body.substr(pos, len);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) {
            sink(std::move(line));
            ++lines;
        }
        if (end == std::string::npos) break;
        pos = end + 1;
    }
}

}  // namespace

PollStats poll_source(const std::string& endpoint, const RateLimitPolicy& policy,
                      std::chrono::milliseconds duration, const LineSink& sink,
                      uint64_t seed) {
    policy.validate();
    Endpoint target = split_endpoint(endpoint);
    httplib::Client client(target.base);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(10, 0);

    std::mt19937_64 rng(seed ? seed : std::random_device{}());
    auto draw_interval = [&] {
        auto span = static_cast<uint64_t>(
            (policy.poll_interval_max - policy.poll_interval_min).count());
        return policy.poll_interval_min +
               std::chrono::milliseconds(span ? rng() % (span + 1) : 0);
    };

    using Clock = std::chrono::steady_clock;
    SlidingWindowLimiter limiter(policy.max_requests, policy.window);
    PollStats stats;
    Clock::time_point deadline = Clock::now() + duration;
    Clock::time_point earliest_next = Clock::now();

    // Waits out both gates (inter-request interval and window quota), then
    // stamps and sends one request. Returns false when the deadline expires
    // before a slot opens.
    auto send = [&](httplib::Result& result) {
        for (;;) {
            Clock::time_point now = Clock::now();
            if (now >= deadline) return false;
            std::chrono::milliseconds wait = limiter.delay_until_permit(now);
            if (earliest_next > now)
                wait = std::max(
                    wait, std::chrono::duration_cast<std::chrono::milliseconds>(
                              earliest_next - now));
            if (wait.count() <= 0) break;
            std::this_thread::sleep_for(
                std::min(wait, std::chrono::duration_cast<std::chrono::milliseconds>(
                                   deadline - now)));
        }
        Clock::time_point sent = Clock::now();
        limiter.record(sent);
        stats.request_times.push_back(sent);
        ++stats.requests;
        earliest_next = sent + draw_interval();
        result = client.Get(target.path);
        return true;
    };

    while (Clock::now() < deadline) {
        bool delivered = false;
        for (int attempt = 1; attempt <= kMaxAttempts && !delivered; ++attempt) {
            if (attempt > 1) {
                ++stats.retries;
                std::this_thread::sleep_for(kBackoffStart * (1 << (attempt - 2)));
            }
            httplib::Result result;
            if (!send(result)) return stats;
            if (result && result->status >= 200 && result->status < 300) {
                forward_lines(result->body, sink, stats.lines);
                delivered = true;
            } else if (result) {
                ++stats.http_errors;
            } else {
                ++stats.network_errors;
            }
        }
    }
    return stats;
}

}  // namespace tweetpipe
