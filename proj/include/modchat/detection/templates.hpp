#pragma once

#include <string>
#include <string_view>

#include "modchat/detection/detection.hpp"

namespace modchat::detection {

/// Localized counter-speech text for `request`, in en, de or el (anything
/// else falls back to en). Names the violated norms and the reason and stays
/// within 50..100 words.
std::string template_counter(const CounterRequest& request);

/// Generic English counter text for when the author's language and origin
/// are not available.
std::string generic_counter(const ViolationSummary& violation);

/// The reason as shown to readers of `language`; unknown reasons pass through.
std::string localized_reason(std::string_view reason, std::string_view language);

/// Category line shown on warnings, e.g. "legal and ethical violation".
std::string localized_category(const ViolationSummary& violation, std::string_view language);

} // namespace modchat::detection
