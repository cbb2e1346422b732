#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

namespace tweetpipe::civil {

// Days since 1970-01-01 for a proleptic-Gregorian civil date.
inline int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    int64_t era = (y >= 0 ? y : y - 399) / 400;
    int yoe = static_cast<int>(y - era * 400);
    int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

struct CivilDateTime {
    int year, month, day, hour, minute, second;
    int weekday;  // 0 = Sunday
};

inline CivilDateTime civil_from_epoch(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / 86400;
    int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int64_t z = days + 719468;
    int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    int64_t doe = z - era * 146097;
    int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    int64_t y = yoe + era * 400;
    int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    int64_t mp = (5 * doy + 2) / 153;
    int64_t d = doy - (153 * mp + 2) / 5 + 1;
    int64_t m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;

    CivilDateTime out;
    out.year = static_cast<int>(y);
    out.month = static_cast<int>(m);
    out.day = static_cast<int>(d);
    out.hour = static_cast<int>(rem / 3600);
    out.minute = static_cast<int>(rem / 60 % 60);
    out.second = static_cast<int>(rem % 60);
    out.weekday = static_cast<int>(((days % 7) + 7 + 4) % 7);  // 1970-01-01 was Thursday
    return out;
}

inline std::string format_iso8601_utc(int64_t epoch_seconds) {
    CivilDateTime t = civil_from_epoch(epoch_seconds);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", t.year, t.month,
                  t.day, t.hour, t.minute, t.second);
    return buf;
}

// Source-style timestamp, e.g. "Tue Oct 01 00:00:00 +0000 2019".
inline std::string format_source_timestamp(int64_t epoch_seconds) {
    static const char* kDays[] = {"Sun", "Mon", "Tue", "Wed", "Thu", "Fri", "Sat"};
    static const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    CivilDateTime t = civil_from_epoch(epoch_seconds);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s %s %02d %02d:%02d:%02d +0000 %04d",
                  kDays[t.weekday], kMonths[t.month - 1], t.day, t.hour, t.minute,
                  t.second, t.year);
    return buf;
}

}  // namespace tweetpipe::civil
