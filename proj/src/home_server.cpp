#include "smarthouse/home_server.hpp"

#include <spdlog/spdlog.h>

#include <chrono>

namespace smarthouse {

HomeServer::HomeServer(ServerConfig config, Snapshot initial, SimTime start)
    : config_(std::move(config)),
      clock_(start),
      store_(std::move(initial)),
      auth_(config_.auth,
            [this](std::string_view username) -> std::optional<std::string> {
                const auto snap = store_.snapshot();
                const auto it = snap->users.find(username);
                if (it == snap->users.end()) return std::nullopt;
                return auth::recover_password(it->second);
            }),
      fleet_(store_, config_.periods),
      engine_(store_, [this](const ActionCall& call) { fleet_.dispatch(call.oid, call.action, call.arg); },
              config_.restart_grace),
      gateway_(store_, auth_, [this](Oid oid, std::string_view action, std::string_view arg) {
          fleet_.dispatch(oid, action, arg);
      }) {}

HomeServer::~HomeServer() = default;

std::vector<automation::FiredAction> HomeServer::tick_now() {
    std::lock_guard lock(tick_mutex_);
    started_ = true;
    const auto now = clock_.now();
    auto fired = engine_.tick(now);
    fleet_.tick(now);
    if (fired_observer_)
        for (const auto& f : fired) fired_observer_(f);
    return fired;
}

std::vector<automation::FiredAction> HomeServer::step() {
    if (!started_) tick_now();
    clock_.advance(kTick);
    return tick_now();
}

std::vector<automation::FiredAction> HomeServer::run_until(SimTime t) {
    std::vector<automation::FiredAction> all;
    if (!started_) all = tick_now();
    while (clock_.now() + kTick <= t) {
        auto fired = step();
        all.insert(all.end(), fired.begin(), fired.end());
    }
    return all;
}

std::vector<automation::FiredAction> HomeServer::run_for(SimTime duration) { return run_until(clock_.now() + duration); }

RealtimeDriver::RealtimeDriver(HomeServer& server, double speed) : server_(server), speed_(speed) {
    if (!(speed_ > 0)) throw std::invalid_argument("speed must be positive");
}

RealtimeDriver::~RealtimeDriver() { stop(); }

void RealtimeDriver::start() {
    if (running_.exchange(true)) return;
    thread_ = std::thread([this] {
        const auto wall_start = std::chrono::steady_clock::now();
        const auto sim_start = server_.clock().now();
        while (running_.load()) {
            const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start);
            const auto target = sim_start + SimTime{static_cast<std::int64_t>(elapsed.count() * speed_)};
            try {
                server_.run_until(target);
            } catch (const std::exception& e) {
                spdlog::error("simulation step failed: {}", e.what());
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
    });
}

void RealtimeDriver::stop() {
    if (!running_.exchange(false)) return;
    if (thread_.joinable()) thread_.join();
}

}  // namespace smarthouse
