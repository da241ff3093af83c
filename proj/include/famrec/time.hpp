#ifndef FAMREC_TIME_HPP_
#define FAMREC_TIME_HPP_

#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>

#include "famrec/error.hpp"

namespace famrec {

/// Second-precision UTC instant.
using Instant = std::chrono::sys_seconds;

namespace detail {

inline bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
    out = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (s[i] < '0' || s[i] > '9')
            return false;
        out = out * 10 + (s[i] - '0');
    }
    return true;
}

} // namespace detail

/// Parses "YYYY-MM-DD HH:MM:SS". Throws DataError on anything else.
inline Instant parse_instant(std::string_view text) {
    using namespace std::chrono;
    auto fail = [&] { return DataError("bad timestamp '" + std::string(text) + "'"); };
    if (text.size() != 19 || text[4] != '-' || text[7] != '-' || text[10] != ' ' ||
        text[13] != ':' || text[16] != ':')
        throw fail();
    int y, mo, d, h, mi, s;
    if (!detail::read_digits(text, 0, 4, y) || !detail::read_digits(text, 5, 2, mo) ||
        !detail::read_digits(text, 8, 2, d) || !detail::read_digits(text, 11, 2, h) ||
        !detail::read_digits(text, 14, 2, mi) || !detail::read_digits(text, 17, 2, s))
        throw fail();
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59)
        throw fail();
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

inline std::string format_instant(Instant t) {
    using namespace std::chrono;
    const auto day_start = floor<days>(t);
    const year_month_day ymd{day_start};
    const hh_mm_ss hms{t - day_start};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02ld:%02ld:%02ld", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

} // namespace famrec

#endif // FAMREC_TIME_HPP_
