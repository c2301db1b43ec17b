#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "smarthouse/auth.hpp"
#include "smarthouse/automation.hpp"
#include "smarthouse/clock.hpp"
#include "smarthouse/device_sim.hpp"
#include "smarthouse/gateway.hpp"
#include "smarthouse/store.hpp"

namespace httplib {
class Server;
}

namespace smarthouse {

struct ServerConfig {
    auth::AuthConfig auth;
    sim::TierPeriods periods;
    SimTime restart_grace = automation::Engine::kDefaultGrace;
};

/// Everything behind the gateway, driven by one virtual clock. Each step
/// advances the clock by one 100 ms tick, runs the automation engine on the
/// current snapshot, then lets the fleet apply commands and publish polls.
class HomeServer {
public:
    explicit HomeServer(ServerConfig config, Snapshot initial = {}, SimTime start = SimTime{0});
    ~HomeServer();

    HomeServer(const HomeServer&) = delete;
    HomeServer& operator=(const HomeServer&) = delete;

    Store& store() { return store_; }
    sim::Fleet& fleet() { return fleet_; }
    Gateway& gateway() { return gateway_; }
    auth::AuthService& auth() { return auth_; }
    VirtualClock& clock() { return clock_; }
    const ServerConfig& config() const { return config_; }

    /// Runs the tick for the current instant. The first call happens
    /// implicitly on the first step().
    std::vector<automation::FiredAction> tick_now();
    std::vector<automation::FiredAction> step();
    /// Steps until the clock reaches `t`. Returns every fired action.
    std::vector<automation::FiredAction> run_until(SimTime t);
    std::vector<automation::FiredAction> run_for(SimTime duration);

    std::string handle_target(std::string_view target) { return gateway_.handle_target(target, clock_.now()); }
    std::string handle_sms(std::string_view frame) { return gateway_.handle_sms(frame, clock_.now()); }

    void set_fired_observer(std::function<void(const automation::FiredAction&)> fn) { fired_observer_ = std::move(fn); }

private:
    ServerConfig config_;
    VirtualClock clock_;
    Store store_;
    auth::AuthService auth_;
    sim::Fleet fleet_;
    automation::Engine engine_;
    Gateway gateway_;
    std::atomic<bool> started_{false};
    std::mutex tick_mutex_;
    std::function<void(const automation::FiredAction&)> fired_observer_;
};

/// HTTP front end: GET /m/* to the gateway, POST /sms with the frame as
/// body (emulated GSM modem), optional static files under /ui/.
class HttpFrontend {
public:
    explicit HttpFrontend(HomeServer& server);
    ~HttpFrontend();

    void mount_ui(const std::filesystem::path& dir);

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port.
    int start(const std::string& host, int port);
    void stop();

private:
    HomeServer& server_;
    std::unique_ptr<httplib::Server> http_;
    std::thread thread_;
};

/// Drives a HomeServer's clock from wall time on a background thread,
/// `speed` simulated seconds per wall second.
class RealtimeDriver {
public:
    RealtimeDriver(HomeServer& server, double speed = 1.0);
    ~RealtimeDriver();

    void start();
    void stop();

private:
    HomeServer& server_;
    double speed_;
    std::atomic<bool> running_{false};
    std::thread thread_;
};

}  // namespace smarthouse
