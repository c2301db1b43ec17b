#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smarthouse/domain.hpp"
#include "smarthouse/map_codec.hpp"

namespace smarthouse {

enum class StoreErrc { unknown_oid, duplicate_oid, unknown_id, invalid, in_use, stale_state, parse, io };

class StoreError : public std::runtime_error {
public:
    StoreError(StoreErrc code, const std::string& what, int line = 0);

    StoreErrc code() const noexcept { return code_; }
    int line() const noexcept { return line_; }

private:
    StoreErrc code_;
    int line_;
};

/// Immutable point-in-time view of every table.
struct Snapshot {
    std::map<Oid, Device> devices;
    std::map<Oid, DeviceState> states;
    map::MapScene scene;
    std::map<std::string, ScheduledTask, std::less<>> schedules;
    std::map<std::string, Rule, std::less<>> rules;
    std::map<std::string, User, std::less<>> users;
    std::uint64_t revision = 0;

    const Device* device(Oid oid) const;
    const DeviceState* state(Oid oid) const;

    /// Equality over tables only; the revision counter is not compared.
    bool same_tables(const Snapshot& other) const;
};

/// Text form with sections #DEVICES #STATES #WALLS #ICONS #SCHEDULES #RULES #USERS.
std::string serialize(const Snapshot& snap);
/// Parses a whole store file; throws StoreError(parse) with a line number.
Snapshot deserialize(std::string_view text);

/// Validation shared by the store and the gateway. Each returns an error
/// message or nullopt.
std::optional<std::string> check_condition(const Snapshot& snap, const Condition& cond);
std::optional<std::string> check_action_call(const Snapshot& snap, const ActionCall& call);

/// The shared database. One writer at a time; readers take snapshots that
/// stay valid and unchanged while writes proceed.
class Store {
public:
    Store();
    explicit Store(Snapshot initial);

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    std::shared_ptr<const Snapshot> snapshot() const;

    std::uint64_t add_device(Device device);
    std::uint64_t remove_device(Oid oid);
    std::uint64_t upsert_state(DeviceState state);
    std::uint64_t upsert_states(const std::vector<DeviceState>& states);
    std::uint64_t set_scene(map::MapScene scene);
    std::uint64_t put_schedule(ScheduledTask task);
    std::uint64_t set_schedule_enabled(std::string_view id, bool enabled);
    std::uint64_t put_rule(Rule rule);
    std::uint64_t set_rule_enabled(std::string_view id, bool enabled);
    std::uint64_t put_user(User user);

    /// Writes atomically (temp file + rename).
    void persist(const std::filesystem::path& path) const;
    /// Loads a store file; nothing is loaded if any line fails to parse.
    static Snapshot restore(const std::filesystem::path& path);

private:
    template <typename Fn>
    std::uint64_t mutate(Fn&& fn);

    std::mutex write_mutex_;
    mutable std::mutex publish_mutex_;
    std::shared_ptr<const Snapshot> current_;
};

}  // namespace smarthouse
