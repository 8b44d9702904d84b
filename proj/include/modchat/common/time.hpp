#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace modchat {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Injectable time source; tests pin it, services use system_now().
using Clock = std::function<Timestamp()>;

Timestamp system_now();

/// `YYYY-MM-DDTHH:MM:SS.mmmZ` (UTC, millisecond precision).
std::string format_rfc3339(Timestamp t);

/// Accepts the form produced by format_rfc3339, with or without the
/// fractional part. Returns nullopt on anything else.
std::optional<Timestamp> parse_rfc3339(std::string_view s);

} // namespace modchat
