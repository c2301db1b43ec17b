#include "smarthouse/auth.hpp"

#include <algorithm>

#include "smarthouse/crypto.hpp"
#include "smarthouse/text.hpp"

namespace smarthouse::auth {
namespace {

std::vector<std::uint8_t> keystream(std::string_view seed, std::size_t n) {
    std::vector<std::uint8_t> out;
    out.reserve(n);
    for (std::uint32_t block = 0; out.size() < n; ++block) {
        const auto d = crypto::sha256(std::string(seed) + ":" + std::to_string(block));
        for (auto b : d) {
            if (out.size() == n) break;
            out.push_back(b);
        }
    }
    return out;
}

std::string password_seed(std::string_view salt_hex, std::string_view username) {
    return std::string(salt_hex) + ":" + std::string(username);
}

}  // namespace

bool is_magic_hex(std::string_view s) {
    return s.size() == kMagicHexLen &&
           std::all_of(s.begin(), s.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

std::string compute_credential_hash(std::string_view username, std::string_view password, std::string_view magic_hex) {
    if (!is_magic_hex(magic_hex)) throw AuthError("malformed magic");
    std::string material;
    material.reserve(username.size() + password.size() + magic_hex.size() + 2);
    material.append(username).append(":").append(password).append(":").append(magic_hex);
    return crypto::to_hex(crypto::sha256(material));
}

std::string seal_magic(std::string_view magic_hex, std::string_view shared_secret, std::string_view client_id) {
    const auto magic = crypto::from_hex(magic_hex);
    if (!magic || magic->size() != kMagicBytes) throw AuthError("malformed magic");
    std::string seed(shared_secret);
    seed.append(client_id);
    const auto key = crypto::sha256(seed);
    std::vector<std::uint8_t> sealed(kMagicBytes);
    for (std::size_t i = 0; i < kMagicBytes; ++i) sealed[i] = (*magic)[i] ^ key[i];
    return crypto::to_hex(sealed);
}

std::string unseal_magic(std::string_view sealed_hex, std::string_view shared_secret, std::string_view client_id) {
    return seal_magic(sealed_hex, shared_secret, client_id);
}

User make_user(std::string username, std::string_view password, Role role, std::optional<std::set<Oid>> allowed_oids,
               std::optional<std::string> salt_hex) {
    User user;
    user.username = std::move(username);
    user.role = role;
    user.allowed_oids = std::move(allowed_oids);
    user.verifier_salt = salt_hex ? *salt_hex : crypto::to_hex(crypto::random_bytes(16));
    const auto ks = keystream(password_seed(user.verifier_salt, user.username), password.size());
    std::vector<std::uint8_t> masked(password.size());
    for (std::size_t i = 0; i < password.size(); ++i) masked[i] = static_cast<std::uint8_t>(password[i]) ^ ks[i];
    user.stored_verifier = crypto::to_hex(masked);
    return user;
}

std::string recover_password(const User& user) {
    const auto masked = crypto::from_hex(user.stored_verifier);
    if (!masked) throw AuthError("corrupt verifier for " + user.username);
    const auto ks = keystream(password_seed(user.verifier_salt, user.username), masked->size());
    std::string password(masked->size(), '\0');
    for (std::size_t i = 0; i < masked->size(); ++i) password[i] = static_cast<char>((*masked)[i] ^ ks[i]);
    return password;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::allow: return "allow";
        case Verdict::deny_expired: return "deny_expired";
        case Verdict::deny_bad_hash: return "deny_bad_hash";
        case Verdict::deny_unknown: return "deny_unknown";
    }
    return "invalid";
}

AuthService::AuthService(AuthConfig config, PasswordLookup lookup)
    : config_(std::move(config)), lookup_(std::move(lookup)) {}

std::optional<std::string> AuthService::issue_magic(std::string_view client_id, std::string_view special_code,
                                                    SimTime now) {
    if (!text::is_token(client_id, 32)) return std::nullopt;
    if (!crypto::constant_time_equal(special_code, config_.special_code)) return std::nullopt;
    MagicSession session{std::string(client_id), crypto::to_hex(crypto::random_bytes(kMagicBytes)), now};
    auto sealed = seal_magic(session.magic_hex, config_.shared_secret, client_id);
    std::lock_guard lock(mutex_);
    sessions_.insert_or_assign(session.client_id, std::move(session));
    return sealed;
}

Verdict AuthService::verify(std::string_view client_id, std::string_view username, std::string_view presented_hash,
                            SimTime now) const {
    MagicSession session;
    {
        std::lock_guard lock(mutex_);
        const auto it = sessions_.find(client_id);
        if (it == sessions_.end()) return Verdict::deny_unknown;
        session = it->second;
    }
    if (now - session.issued_at > config_.ttl) return Verdict::deny_expired;
    const auto password = lookup_(username);
    if (!password) return Verdict::deny_unknown;
    const auto expected = compute_credential_hash(username, *password, session.magic_hex);
    return crypto::constant_time_equal(expected, presented_hash) ? Verdict::allow : Verdict::deny_bad_hash;
}

std::optional<MagicSession> AuthService::session(std::string_view client_id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(client_id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
}

}  // namespace smarthouse::auth
