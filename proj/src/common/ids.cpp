#include "modchat/common/ids.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <stdexcept>
#include <vector>

namespace modchat {

namespace {

std::string to_hex(const unsigned char* data, std::size_t n)
{
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        out += kDigits[data[i] >> 4];
        out += kDigits[data[i] & 0x0f];
    }
    return out;
}

std::string sha256_hex(std::string_view salt, std::string_view secret)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, salt.data(), salt.size()) == 1 &&
                    EVP_DigestUpdate(ctx, secret.data(), secret.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok)
        throw std::runtime_error("sha256 failed");
    return to_hex(digest, len);
}

} // namespace

std::string random_hex(std::size_t bytes)
{
    std::vector<unsigned char> buf(bytes);
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1)
        throw std::runtime_error("RAND_bytes failed");
    return to_hex(buf.data(), buf.size());
}

std::string hash_secret(std::string_view secret)
{
    const std::string salt = random_hex(16);
    return salt + "$" + sha256_hex(salt, secret);
}

bool verify_secret(std::string_view secret, std::string_view stored)
{
    const auto sep = stored.find('$');
    if (sep == std::string_view::npos)
        return false;
    const std::string expected = sha256_hex(stored.substr(0, sep), secret);
    const std::string_view actual = stored.substr(sep + 1);
    return expected.size() == actual.size() &&
           CRYPTO_memcmp(expected.data(), actual.data(), expected.size()) == 0;
}

} // namespace modchat
