#pragma once

#include <string>
#include <string_view>

#include "modchat/detection/detection.hpp"

namespace modchat::detection {

/// The classification instruction, the reply contract and the message inside
/// a `<text>` block. `&`, `<` and `>` in the message are entity-escaped so it
/// cannot close the block.
std::string build_detection_prompt(std::string_view text);

/// The counter-speech instruction with origin and language filled in,
/// followed by the violation summary and the message block.
std::string build_counter_prompt(const CounterRequest& request);

/// Parses the three-line reply contract:
///
///     hate | no-hate
///     <severity 1-5>          (`-` or absent for no-hate)
///     holocaust-denial: yes | no
///
/// Lines are trimmed and compared case-insensitively. Anything else,
/// including no-hate with a severity or with denial, throws BackendError.
Classification parse_detection_reply(std::string_view reply);

std::string escape_block(std::string_view text);

} // namespace modchat::detection
