#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smarthouse/domain.hpp"
#include "smarthouse/map_codec.hpp"
#include "smarthouse/wire.hpp"

namespace smarthouse {
class HomeServer;
}

namespace smarthouse::client {

/// Exit codes of the CLI, one per error class below.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAuth = 2;
inline constexpr int kExitNetwork = 3;
inline constexpr int kExitValidation = 4;

class ClientError : public std::runtime_error {
public:
    ClientError(int exit_code, const std::string& what) : std::runtime_error(what), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

class NetworkError : public ClientError {
public:
    explicit NetworkError(const std::string& what) : ClientError(kExitNetwork, what) {}
};
class AuthRefused : public ClientError {
public:
    explicit AuthRefused(const std::string& what) : ClientError(kExitAuth, what) {}
};
class ValidationError : public ClientError {
public:
    explicit ValidationError(const std::string& what) : ClientError(kExitValidation, what) {}
};

/// How requests reach the gateway. Implementations throw NetworkError.
class Transport {
public:
    virtual ~Transport() = default;
    virtual std::string get(const std::string& target) = 0;
    virtual std::string sms(const std::string& frame) = 0;
};

/// HTTP GET for /m/*, POST /sms for frames.
class HttpTransport final : public Transport {
public:
    /// `server` is "http://host:port" or "host:port".
    explicit HttpTransport(const std::string& server);
    ~HttpTransport() override;
    std::string get(const std::string& target) override;
    std::string sms(const std::string& frame) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// In-process transport straight into a HomeServer's gateway. Every byte
/// exchanged is appended to the capture when one is set.
class LoopbackTransport final : public Transport {
public:
    explicit LoopbackTransport(HomeServer& server) : server_(server) {}
    std::string get(const std::string& target) override;
    std::string sms(const std::string& frame) override;

    void capture_into(std::vector<std::string>* log) { log_ = log; }

private:
    HomeServer& server_;
    std::vector<std::string>* log_ = nullptr;
};

struct ClientConfig {
    std::string client_id = "ph1";
    std::string shared_secret;
    std::string special_code;
    std::string username;
    std::chrono::milliseconds staleness{10'000};
};

using ClientClock = std::function<std::chrono::milliseconds()>;

/// Steady-clock milliseconds, the default ClientClock.
std::chrono::milliseconds steady_now();

/// The mobile application's session: handshake, login, two-tier caches and
/// schedule/rule management. Single-threaded.
class ClientSession {
public:
    /// Handshake, unseal, acknowledge. Throws AuthRefused, NetworkError.
    static ClientSession login(Transport& transport, ClientConfig config, std::string password,
                               ClientClock clock = steady_now);

    /// "Update Devices Data": device table with capabilities.
    void update_devices_data();
    /// "Update Information": states plus map.
    void update_information();
    /// Calls update_information() when the state cache is older than the staleness bound.
    bool ensure_fresh();

    const std::vector<Device>& devices() const { return devices_; }
    const std::vector<DeviceState>& states() const { return states_; }
    const map::MapScene& scene() const { return scene_; }
    const Device* device(Oid oid) const;
    const DeviceState* state(Oid oid) const;
    std::optional<std::chrono::milliseconds> devices_age() const;
    std::optional<std::chrono::milliseconds> state_age() const;

    void command(Oid oid, std::string_view action, std::string_view arg = {});

    /// Validates against the cached device table, sends, then re-lists to
    /// confirm the server holds the record.
    void define_schedule(const ScheduledTask& task);
    std::vector<ScheduledTask> list_schedules();
    void set_schedule_enabled(std::string_view id, bool enabled);

    void define_rule(const Rule& rule);
    std::vector<Rule> list_rules();
    void set_rule_enabled(std::string_view id, bool enabled);

    /// Mutating requests over the 160-char channel. No retry: a stale hash
    /// surfaces as AuthRefused. Throws ValidationError when the frame would
    /// not fit, before anything is sent.
    void sms_command(Oid oid, std::string_view action, std::string_view arg = {});
    void sms_define_schedule(const ScheduledTask& task);
    void sms_set_schedule_enabled(std::string_view id, bool enabled);
    void sms_define_rule(const Rule& rule);
    void sms_set_rule_enabled(std::string_view id, bool enabled);

    /// Fresh handshake plus acknowledge.
    void refresh_magic();
    const std::string& magic() const { return magic_; }
    const ClientConfig& config() const { return config_; }

private:
    ClientSession(Transport& transport, ClientConfig config, std::string password, ClientClock clock);

    wire::WireRequest authed(std::string path) const;
    /// Sends with the current hash; on ERR AUTH re-handshakes and retries once.
    wire::WireResponse call(const wire::WireRequest& request);
    wire::WireResponse send_once(const wire::WireRequest& request);
    void send_sms(const wire::WireRequest& request);
    void check_action(const ActionCall& call) const;
    void check_condition(const Condition& cond) const;

    Transport* transport_;
    ClientConfig config_;
    std::string password_;
    ClientClock clock_;
    std::string magic_;
    std::chrono::milliseconds magic_obtained_{0};

    std::vector<Device> devices_;
    std::vector<DeviceState> states_;
    map::MapScene scene_;
    std::optional<std::chrono::milliseconds> devices_fetched_;
    std::optional<std::chrono::milliseconds> state_fetched_;
};

wire::WireRequest schedule_request(const ScheduledTask& task);
wire::WireRequest rule_request(const Rule& rule);

/// ASCII top view: walls as line art, selectable icons as letters, decorative
/// icons as '*', followed by a legend line per icon.
std::string render_ascii(const map::MapScene& scene, int cols = 64, int rows = 24);

}  // namespace smarthouse::client
