#include "copter/modes.hpp"

namespace copter {

std::optional<Mode> mode_from_name(std::string_view name) {
  for (Mode m : kAllModes) {
    if (mode_name(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<ModeCategory> category_from_name(std::string_view name) {
  for (int i = 0; i < kNumCategories; ++i) {
    const auto c = static_cast<ModeCategory>(i);
    if (category_name(c) == name) return c;
  }
  return std::nullopt;
}

}  // namespace copter
