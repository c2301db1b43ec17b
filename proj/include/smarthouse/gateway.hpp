#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "smarthouse/auth.hpp"
#include "smarthouse/clock.hpp"
#include "smarthouse/store.hpp"
#include "smarthouse/wire.hpp"

namespace smarthouse {

/// "Update Devices Data" body: one device line per registered device.
std::vector<std::string> devices_payload(const Snapshot& snap);

/// "Update Information" body: #STATES section then the scene block, with
/// icon ids of placed devices refreshed from their current states.
std::vector<std::string> state_and_map_payload(const Snapshot& snap);

/// The scene with each placed device's icon replaced by icon_for(state).
map::MapScene live_scene(const Snapshot& snap);

/// Machine-facing endpoint table. Thread-safe: every handler goes through
/// the store, the auth service or the command sink.
class Gateway {
public:
    using CommandSink = std::function<void(Oid oid, std::string_view action, std::string_view arg)>;
    using TrafficObserver = std::function<void(std::string_view request, std::string_view response)>;

    Gateway(Store& store, auth::AuthService& auth, CommandSink sink);

    wire::WireResponse handle(const wire::WireRequest& request, SimTime now);

    /// Parses a raw target and handles it; malformed targets yield ERR PARAM.
    std::string handle_target(std::string_view target, SimTime now);

    /// SMS path: decode, then the same handle(). Malformed frames yield ERR SMS.
    std::string handle_sms(std::string_view frame, SimTime now);

    /// Sees every request and rendered response (traffic capture).
    void set_observer(TrafficObserver observer) { observer_ = std::move(observer); }

private:
    wire::WireResponse respond(const wire::WireRequest& request, SimTime now);
    wire::WireResponse dispatch(const wire::WireRequest& request, SimTime now);
    std::string record(std::string_view request, const wire::WireResponse& response);

    Store& store_;
    auth::AuthService& auth_;
    CommandSink sink_;
    TrafficObserver observer_;
};

}  // namespace smarthouse
