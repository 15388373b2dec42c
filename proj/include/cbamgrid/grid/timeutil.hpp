#pragma once

#include <cstdint>
#include <string>

namespace cbamgrid::grid {

inline constexpr std::int64_t kSecondsPerHour = 3600;

// ISO-8601 UTC, e.g. "2024-01-01T00:00:00Z".
std::int64_t parse_iso8601(const std::string& s);
std::string format_iso8601(std::int64_t epoch_seconds);

inline int hour_of_day(std::int64_t epoch_seconds) {
    return static_cast<int>((epoch_seconds % 86400 + 86400) % 86400 / 3600);
}

// 0 = Monday .. 6 = Sunday (1970-01-01 was a Thursday).
inline int day_of_week(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

}  // namespace cbamgrid::grid
