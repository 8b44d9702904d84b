#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace modchat {

/// `bytes` bytes from the OpenSSL CSPRNG, hex encoded.
std::string random_hex(std::size_t bytes);

/// Salted SHA-256 of a secret, as `salt$digest` in hex.
std::string hash_secret(std::string_view secret);

/// Constant-time check of `secret` against a value from hash_secret().
bool verify_secret(std::string_view secret, std::string_view stored);

} // namespace modchat
