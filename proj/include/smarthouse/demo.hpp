#pragma once

#include <string_view>

#include "smarthouse/device_sim.hpp"
#include "smarthouse/store.hpp"

namespace smarthouse::demo {

// Fixed oids of the demo house.
inline constexpr Oid kLamp = 1;
inline constexpr Oid kGasSensor = 2;
inline constexpr Oid kFrontDoor = 3;
inline constexpr Oid kWindow = 4;
inline constexpr Oid kDriveway = 5;
inline constexpr Oid kHeartMonitor = 6;
inline constexpr Oid kThermometer = 7;
inline constexpr Oid kAirConditioner = 8;

/// Eight devices (every kind, tier and schema), a two-room plan with
/// decorative furniture, and one admin user.
Snapshot house(std::string_view admin_password, std::string_view admin_salt_hex = {});

/// Scripted behaviors for the sensors of house().
void attach_behaviors(sim::Fleet& fleet);

}  // namespace smarthouse::demo
