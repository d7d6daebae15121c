#include "geostate/state.hpp"

#include <array>
#include <cctype>
#include <string>

#include "geostate/error.hpp"

namespace geostate {
namespace {

struct StateRow {
  const char* code;
  const char* name;
};

constexpr std::array<StateRow, StateLabel::kCount> kStates{{
    {"AK", "Alaska"},        {"AL", "Alabama"},       {"AR", "Arkansas"},
    {"AZ", "Arizona"},       {"CA", "California"},    {"CO", "Colorado"},
    {"CT", "Connecticut"},   {"DE", "Delaware"},      {"FL", "Florida"},
    {"GA", "Georgia"},       {"HI", "Hawaii"},        {"IA", "Iowa"},
    {"ID", "Idaho"},         {"IL", "Illinois"},      {"IN", "Indiana"},
    {"KS", "Kansas"},        {"KY", "Kentucky"},      {"LA", "Louisiana"},
    {"MA", "Massachusetts"}, {"MD", "Maryland"},      {"ME", "Maine"},
    {"MI", "Michigan"},      {"MN", "Minnesota"},     {"MO", "Missouri"},
    {"MS", "Mississippi"},   {"MT", "Montana"},       {"NC", "North Carolina"},
    {"ND", "North Dakota"},  {"NE", "Nebraska"},      {"NH", "New Hampshire"},
    {"NJ", "New Jersey"},    {"NM", "New Mexico"},    {"NV", "Nevada"},
    {"NY", "New York"},      {"OH", "Ohio"},          {"OK", "Oklahoma"},
    {"OR", "Oregon"},        {"PA", "Pennsylvania"},  {"RI", "Rhode Island"},
    {"SC", "South Carolina"},{"SD", "South Dakota"},  {"TN", "Tennessee"},
    {"TX", "Texas"},         {"UT", "Utah"},          {"VA", "Virginia"},
    {"VT", "Vermont"},       {"WA", "Washington"},    {"WI", "Wisconsin"},
    {"WV", "West Virginia"}, {"WY", "Wyoming"},
}};

// Lowercase, trim, collapse inner whitespace runs to single spaces.
std::string normalize(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace

std::optional<StateLabel> StateLabel::parse(std::string_view text) {
  const std::string key = normalize(text);
  if (key.empty()) return std::nullopt;
  for (int i = 0; i < kCount; ++i) {
    if (key == normalize(kStates[i].code) || key == normalize(kStates[i].name))
      return StateLabel(static_cast<std::uint8_t>(i));
  }
  return std::nullopt;
}

StateLabel StateLabel::from_index(int idx) {
  if (idx < 0 || idx >= kCount) throw Error("state index out of range: " + std::to_string(idx));
  return StateLabel(static_cast<std::uint8_t>(idx));
}

const std::vector<StateLabel>& StateLabel::all() {
  static const std::vector<StateLabel> states = [] {
    std::vector<StateLabel> v;
    v.reserve(kCount);
    for (int i = 0; i < kCount; ++i) v.push_back(from_index(i));
    return v;
  }();
  return states;
}

std::string_view StateLabel::code() const { return kStates[idx_].code; }
std::string_view StateLabel::name() const { return kStates[idx_].name; }

}  // namespace geostate
