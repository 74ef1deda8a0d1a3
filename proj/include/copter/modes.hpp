#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace copter {

// The closed mode alphabet. Each mode is written as a single character in
// edge files, plan words, and mode languages.
enum class Mode : std::uint8_t {
  Walk = 0,
  Cycle,
  Bus,
  Subway,
  Drive,
  Ride,  // auto passenger
  Motorcycle,
};

inline constexpr int kNumModes = 7;

inline constexpr std::array<Mode, kNumModes> kAllModes = {
    Mode::Walk, Mode::Cycle,      Mode::Bus, Mode::Subway,
    Mode::Drive, Mode::Ride, Mode::Motorcycle};

enum class ModeCategory : std::uint8_t {
  NonMotorized = 0,  // walk, cycle
  PublicTransit,     // bus, subway/train
  Motorized,         // drive, auto passenger, motorcycle
};

inline constexpr int kNumCategories = 3;

constexpr char mode_symbol(Mode m) {
  constexpr std::array<char, kNumModes> symbols = {'w', 'c', 'b', 's',
                                                   'd', 'r', 'm'};
  return symbols[static_cast<int>(m)];
}

constexpr std::optional<Mode> mode_from_symbol(char c) {
  switch (c) {
    case 'w': return Mode::Walk;
    case 'c': return Mode::Cycle;
    case 'b': return Mode::Bus;
    case 's': return Mode::Subway;
    case 'd': return Mode::Drive;
    case 'r': return Mode::Ride;
    case 'm': return Mode::Motorcycle;
    default: return std::nullopt;
  }
}

constexpr std::string_view mode_name(Mode m) {
  constexpr std::array<std::string_view, kNumModes> names = {
      "walk", "cycle", "bus", "subway", "drive", "ride", "motorcycle"};
  return names[static_cast<int>(m)];
}

std::optional<Mode> mode_from_name(std::string_view name);

constexpr ModeCategory category_of(Mode m) {
  switch (m) {
    case Mode::Walk:
    case Mode::Cycle: return ModeCategory::NonMotorized;
    case Mode::Bus:
    case Mode::Subway: return ModeCategory::PublicTransit;
    default: return ModeCategory::Motorized;
  }
}

constexpr std::string_view category_name(ModeCategory c) {
  constexpr std::array<std::string_view, kNumCategories> names = {
      "non_motorized", "public_transit", "motorized"};
  return names[static_cast<int>(c)];
}

std::optional<ModeCategory> category_from_name(std::string_view name);

constexpr bool is_motorized(Mode m) {
  return category_of(m) == ModeCategory::Motorized;
}

constexpr bool is_scheduled_mode(Mode m) {
  return m == Mode::Bus || m == Mode::Subway;
}

}  // namespace copter
