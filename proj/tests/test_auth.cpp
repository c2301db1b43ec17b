#include <gtest/gtest.h>

#include <set>

#include "smarthouse/auth.hpp"
#include "smarthouse/crypto.hpp"

using namespace smarthouse;
using namespace smarthouse::auth;
using namespace std::chrono_literals;

// Reference values from tests/oracles/golden.py (Python hashlib).
namespace golden {
constexpr const char* kHashZeros = "204c3a568c207c9971237b4ebf74a6de8268a43cbf02bce7cd82ec72ba37b2bc";
constexpr const char* kHashOne = "d6125c729153d019933b2dffdcac640c5de834605a2bef9d811e53056ecf805a";
constexpr const char* kSealCounting = "148c91b08f9d0678062cab1043099bfa";
constexpr const char* kSealZeros = "148d93b38b98007f0e25a11b4f0495f5";
constexpr const char* kSha256Abc = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
}  // namespace golden

namespace {

const std::string kZeros(32, '0');
const std::string kOne = std::string(31, '0') + "1";

AuthService make_service(std::chrono::seconds ttl = 300s) {
    return AuthService({"code", "secret", ttl}, [](std::string_view user) -> std::optional<std::string> {
        if (user == "admin") return std::string("123456");
        return std::nullopt;
    });
}

std::string handshake(AuthService& svc, const std::string& client, SimTime now) {
    auto sealed = svc.issue_magic(client, "code", now);
    EXPECT_TRUE(sealed);
    return unseal_magic(*sealed, "secret", client);
}

}  // namespace

TEST(Crypto, Sha256KnownVector) { EXPECT_EQ(crypto::to_hex(crypto::sha256("abc")), golden::kSha256Abc); }

TEST(Crypto, HexRoundTrip) {
    const auto bytes = crypto::random_bytes(20);
    EXPECT_EQ(crypto::from_hex(crypto::to_hex(bytes)), bytes);
    EXPECT_FALSE(crypto::from_hex("abc"));
    EXPECT_FALSE(crypto::from_hex("zz"));
}

TEST(Crypto, ConstantTimeEqual) {
    EXPECT_TRUE(crypto::constant_time_equal("abcd", "abcd"));
    EXPECT_FALSE(crypto::constant_time_equal("abcd", "abce"));
    EXPECT_FALSE(crypto::constant_time_equal("abcd", "abc"));
    EXPECT_TRUE(crypto::constant_time_equal("", ""));
}

TEST(CredentialHash, GoldenValues) {
    EXPECT_EQ(compute_credential_hash("admin", "123456", kZeros), golden::kHashZeros);
    EXPECT_EQ(compute_credential_hash("admin", "123456", kOne), golden::kHashOne);
    EXPECT_EQ(compute_credential_hash("admin", "123456", kZeros), compute_credential_hash("admin", "123456", kZeros));
}

TEST(CredentialHash, MalformedMagic) {
    EXPECT_THROW(compute_credential_hash("a", "b", "00"), AuthError);
    EXPECT_THROW(compute_credential_hash("a", "b", std::string(32, 'A')), AuthError);
    EXPECT_THROW(compute_credential_hash("a", "b", std::string(32, 'g')), AuthError);
}

TEST(Seal, GoldenValues) {
    EXPECT_EQ(seal_magic("000102030405060708090a0b0c0d0e0f", "hunter2", "ph1"), golden::kSealCounting);
    EXPECT_EQ(seal_magic(kZeros, "hunter2", "ph1"), golden::kSealZeros);
}

TEST(Seal, UnsealInvertsSeal) {
    for (int i = 0; i < 200; ++i) {
        const auto m = crypto::to_hex(crypto::random_bytes(kMagicBytes));
        EXPECT_EQ(unseal_magic(seal_magic(m, "s", "c" + std::to_string(i)), "s", "c" + std::to_string(i)), m);
    }
    const auto m = crypto::to_hex(crypto::random_bytes(kMagicBytes));
    EXPECT_NE(unseal_magic(seal_magic(m, "s", "c1"), "wrong", "c1"), m);
}

TEST(AuthService, HandshakeAndVerify) {
    auto svc = make_service();
    const auto magic = handshake(svc, "ph1", SimTime{0});
    ASSERT_TRUE(is_magic_hex(magic));
    EXPECT_EQ(svc.session("ph1")->magic_hex, magic);
    EXPECT_EQ(svc.verify("ph1", "admin", compute_credential_hash("admin", "123456", magic), SimTime{0}), Verdict::allow);
    EXPECT_EQ(svc.verify("ph1", "admin", compute_credential_hash("admin", "654321", magic), SimTime{0}),
              Verdict::deny_bad_hash);
    EXPECT_EQ(svc.verify("ph1", "eve", compute_credential_hash("eve", "123456", magic), SimTime{0}), Verdict::deny_unknown);
    EXPECT_EQ(svc.verify("ph2", "admin", compute_credential_hash("admin", "123456", magic), SimTime{0}),
              Verdict::deny_unknown);
}

TEST(AuthService, WrongCodeRefused) {
    auto svc = make_service();
    EXPECT_FALSE(svc.issue_magic("ph1", "nope", SimTime{0}));
    EXPECT_FALSE(svc.issue_magic("bad id", "code", SimTime{0}));
    EXPECT_FALSE(svc.session("ph1"));
}

TEST(AuthService, TtlBoundary) {
    auto svc = make_service();
    const auto magic = handshake(svc, "ph1", SimTime{1000});
    const auto h = compute_credential_hash("admin", "123456", magic);
    EXPECT_EQ(svc.verify("ph1", "admin", h, SimTime{1000} + 299s), Verdict::allow);
    EXPECT_EQ(svc.verify("ph1", "admin", h, SimTime{1000} + 300s), Verdict::allow);
    EXPECT_EQ(svc.verify("ph1", "admin", h, SimTime{1000} + 301s), Verdict::deny_expired);
    // Re-handshake restores access.
    const auto fresh = handshake(svc, "ph1", SimTime{1000} + 301s);
    EXPECT_EQ(svc.verify("ph1", "admin", compute_credential_hash("admin", "123456", fresh), SimTime{1000} + 302s),
              Verdict::allow);
}

TEST(AuthService, ReplayAfterRotationDenied) {
    auto svc = make_service();
    const auto old_magic = handshake(svc, "ph1", SimTime{0});
    const auto captured = compute_credential_hash("admin", "123456", old_magic);
    handshake(svc, "ph1", SimTime{10});
    EXPECT_EQ(svc.verify("ph1", "admin", captured, SimTime{20}), Verdict::deny_bad_hash);
}

TEST(AuthService, PerClientSessions) {
    auto svc = make_service();
    const auto a = handshake(svc, "a", SimTime{0});
    const auto b = handshake(svc, "b", SimTime{0});
    EXPECT_NE(a, b);
    EXPECT_EQ(svc.verify("a", "admin", compute_credential_hash("admin", "123456", a), SimTime{0}), Verdict::allow);
    EXPECT_EQ(svc.verify("a", "admin", compute_credential_hash("admin", "123456", b), SimTime{0}), Verdict::deny_bad_hash);
}

TEST(AuthService, ThousandHandshakesNoRepeats) {
    auto svc = make_service();
    std::set<std::string> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(handshake(svc, "ph1", SimTime{i}));
    EXPECT_EQ(seen.size(), 1000u);
}

TEST(Users, PasswordMaskedAndRecoverable) {
    const auto u = make_user("admin", "123456", Role::admin);
    EXPECT_EQ(recover_password(u), "123456");
    EXPECT_EQ(u.stored_verifier.find("123456"), std::string::npos);
    EXPECT_EQ(u.stored_verifier.find(crypto::to_hex(std::span<const std::uint8_t>(
                  reinterpret_cast<const std::uint8_t*>("123456"), 6))),
              std::string::npos);
    const auto v = make_user("admin", "123456", Role::admin, std::nullopt, std::string(32, 'a'));
    const auto w = make_user("admin", "123456", Role::admin, std::nullopt, std::string(32, 'b'));
    EXPECT_NE(v.stored_verifier, w.stored_verifier);
    EXPECT_EQ(recover_password(v), recover_password(w));
    const auto long_pw = std::string(100, 'p');
    EXPECT_EQ(recover_password(make_user("x", long_pw, Role::mobile)), long_pw);
}
