#pragma once

#include <memory>

#include "smarthouse/auth.hpp"
#include "smarthouse/client.hpp"
#include "smarthouse/demo.hpp"
#include "smarthouse/home_server.hpp"

namespace fixtures {

inline constexpr const char* kPassword = "tr0ub4dor&3";
inline constexpr const char* kCode = "open-sesame";
inline constexpr const char* kSecret = "pre-shared-secret";

inline smarthouse::ServerConfig config() {
    smarthouse::ServerConfig c;
    c.auth = {kCode, kSecret, std::chrono::seconds{300}};
    return c;
}

inline smarthouse::client::ClientConfig client_config(const std::string& client_id = "ph1",
                                                      const std::string& user = "admin") {
    smarthouse::client::ClientConfig c;
    c.client_id = client_id;
    c.username = user;
    c.special_code = kCode;
    c.shared_secret = kSecret;
    return c;
}

/// Demo house on a virtual clock, already ticked once so every device has a
/// state, with a loopback transport that records all traffic.
struct House {
    std::unique_ptr<smarthouse::HomeServer> server;
    std::vector<std::string> traffic;
    std::unique_ptr<smarthouse::client::LoopbackTransport> transport;

    explicit House(smarthouse::Snapshot initial = smarthouse::demo::house(kPassword),
                   smarthouse::SimTime start = smarthouse::SimTime{0}) {
        server = std::make_unique<smarthouse::HomeServer>(config(), std::move(initial), start);
        server->tick_now();
        transport = std::make_unique<smarthouse::client::LoopbackTransport>(*server);
        transport->capture_into(&traffic);
    }

    smarthouse::client::ClientClock clock() {
        return [s = server.get()] { return s->clock().now(); };
    }

    smarthouse::client::ClientSession login(const std::string& client_id = "ph1", const std::string& user = "admin",
                                            const std::string& password = kPassword) {
        return smarthouse::client::ClientSession::login(*transport, client_config(client_id, user), password, clock());
    }

    /// Handshake + login done by hand; returns the auth params.
    std::string auth_query(const std::string& client_id = "ph1", const std::string& user = "admin",
                           const std::string& password = kPassword) {
        const auto reply = smarthouse::wire::parse_response(get("/m/handshake?c=" + client_id + "&k=" + kCode));
        const auto magic = smarthouse::auth::unseal_magic(reply.lines.at(0), kSecret, client_id);
        return "c=" + client_id + "&u=" + user + "&h=" + smarthouse::auth::compute_credential_hash(user, password, magic);
    }

    std::string get(const std::string& target) { return transport->get(target); }
};

}  // namespace fixtures
