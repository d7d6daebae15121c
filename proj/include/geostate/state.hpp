#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace geostate {

// One of the 50 U.S. states. Ordering (and index()) is alphabetical by
// two-letter postal code; every deterministic tie-break downstream relies
// on that order.
class StateLabel {
public:
  static constexpr int kCount = 50;

  // Accepts a postal code ("TX") or a full name ("Texas"), case-insensitive,
  // surrounding whitespace ignored. Returns nullopt for anything else.
  static std::optional<StateLabel> parse(std::string_view text);
  static StateLabel from_index(int idx);
  static const std::vector<StateLabel>& all();

  StateLabel() = default;  // AK

  std::string_view code() const;
  std::string_view name() const;
  int index() const { return idx_; }

  auto operator<=>(const StateLabel&) const = default;

private:
  explicit StateLabel(std::uint8_t idx) : idx_(idx) {}
  std::uint8_t idx_ = 0;
};

}  // namespace geostate
