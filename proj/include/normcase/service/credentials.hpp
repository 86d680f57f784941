#pragma once

#include <string>
#include <string_view>

namespace normcase::service {

/// Argon2id hash in libsodium's self-describing string format.
std::string hash_secret(std::string_view secret);
bool verify_secret(std::string_view hash, std::string_view secret);

/// 256 random bits, hex encoded.
std::string new_session_token();

}  // namespace normcase::service
