#include "normcase/service/credentials.hpp"

#include <stdexcept>

#include <sodium.h>

namespace normcase::service {

namespace {

void ensure_sodium() {
    static const bool ready = sodium_init() >= 0;
    if (!ready) throw std::runtime_error("libsodium failed to initialise");
}

}  // namespace

std::string hash_secret(std::string_view secret) {
    ensure_sodium();
    char out[crypto_pwhash_STRBYTES];
    if (crypto_pwhash_str(out, secret.data(), secret.size(), crypto_pwhash_OPSLIMIT_INTERACTIVE,
                          crypto_pwhash_MEMLIMIT_INTERACTIVE) != 0)
        throw std::runtime_error("out of memory while hashing a secret");
    return out;
}

bool verify_secret(std::string_view hash, std::string_view secret) {
    ensure_sodium();
    std::string h(hash);
    return crypto_pwhash_str_verify(h.c_str(), secret.data(), secret.size()) == 0;
}

std::string new_session_token() {
    ensure_sodium();
    unsigned char bytes[32];
    randombytes_buf(bytes, sizeof bytes);
    char hex[sizeof bytes * 2 + 1];
    sodium_bin2hex(hex, sizeof hex, bytes, sizeof bytes);
    return hex;
}

}  // namespace normcase::service
