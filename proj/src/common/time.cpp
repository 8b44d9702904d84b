#include "modchat/common/time.hpp"

#include <cstdio>
#include <ctime>

namespace modchat {

Timestamp system_now()
{
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_rfc3339(Timestamp t)
{
    using namespace std::chrono;
    const auto secs = time_point_cast<seconds>(t);
    const auto millis = (t - secs).count();
    const std::time_t tt = system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(millis));
    return buf;
}

std::optional<Timestamp> parse_rfc3339(std::string_view s)
{
    int year = 0, mon = 0, day = 0, hour = 0, min = 0, sec = 0, millis = 0;
    const std::string str(s);
    int consumed = 0;
    if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &mon, &day, &hour, &min,
                    &sec, &consumed) != 6 || consumed != 19)
        return std::nullopt;
    std::string_view rest = s.substr(19);
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        int digits = 0;
        while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') {
            if (digits < 3)
                millis = millis * 10 + (rest.front() - '0');
            ++digits;
            rest.remove_prefix(1);
        }
        if (digits == 0)
            return std::nullopt;
        for (; digits < 3; ++digits)
            millis *= 10;
    }
    if (rest != "Z")
        return std::nullopt;

    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, month{static_cast<unsigned>(mon)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || min > 59 || sec > 60)
        return std::nullopt;
    return Timestamp{sys_days{ymd}} + hours{hour} + minutes{min} + seconds{sec} +
           milliseconds{millis};
}

} // namespace modchat
