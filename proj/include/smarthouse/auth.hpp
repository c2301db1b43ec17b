#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "smarthouse/clock.hpp"
#include "smarthouse/domain.hpp"

namespace smarthouse::auth {

inline constexpr std::size_t kMagicBytes = 16;
inline constexpr std::size_t kMagicHexLen = 2 * kMagicBytes;
inline constexpr std::chrono::seconds kDefaultTtl{300};

class AuthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool is_magic_hex(std::string_view s);

/// hex(SHA-256(username ":" password ":" magic_hex)). Throws AuthError when
/// magic_hex is not 32 lowercase hex characters.
std::string compute_credential_hash(std::string_view username, std::string_view password, std::string_view magic_hex);

/// XORs the magic with the first 16 bytes of SHA-256(shared_secret || client_id).
/// The operation is its own inverse, so unseal_magic is the same transform.
std::string seal_magic(std::string_view magic_hex, std::string_view shared_secret, std::string_view client_id);
std::string unseal_magic(std::string_view sealed_hex, std::string_view shared_secret, std::string_view client_id);

/// Builds a user record. The password is kept recoverable (the salted
/// credential hash has to be recomputed server-side) but masked under a
/// per-user salt; it is never stored in the clear.
User make_user(std::string username, std::string_view password, Role role,
               std::optional<std::set<Oid>> allowed_oids = std::nullopt,
               std::optional<std::string> salt_hex = std::nullopt);
std::string recover_password(const User& user);

struct AuthConfig {
    std::string special_code;
    std::string shared_secret;
    std::chrono::seconds ttl = kDefaultTtl;
};

enum class Verdict { allow, deny_expired, deny_bad_hash, deny_unknown };

std::string_view to_string(Verdict v);

struct MagicSession {
    std::string client_id;
    std::string magic_hex;
    SimTime issued_at{0};
};

/// Per-client expiring salts. Thread-safe; issue and verify on the same
/// client are linearizable.
class AuthService {
public:
    using PasswordLookup = std::function<std::optional<std::string>(std::string_view username)>;

    AuthService(AuthConfig config, PasswordLookup lookup);

    /// Returns the sealed magic, or nullopt when the special code is wrong
    /// or the client id is not a valid token.
    std::optional<std::string> issue_magic(std::string_view client_id, std::string_view special_code, SimTime now);

    Verdict verify(std::string_view client_id, std::string_view username, std::string_view presented_hash,
                   SimTime now) const;

    std::optional<MagicSession> session(std::string_view client_id) const;
    const AuthConfig& config() const { return config_; }

private:
    AuthConfig config_;
    PasswordLookup lookup_;
    mutable std::mutex mutex_;
    std::map<std::string, MagicSession, std::less<>> sessions_;
};

}  // namespace smarthouse::auth
