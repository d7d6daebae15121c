#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

#include "geostate/state.hpp"

namespace geostate {

// Undirected state adjacency. The built-in default is the land-border
// graph of the 50 states: 105 edges, AK and HI isolated, with the two
// corner-touching pairs (AZ-CO, NM-UT) excluded unless asked for.
class AdjacencyGraph {
public:
  static AdjacencyGraph us_land_borders(bool include_corner_touching = false);
  static AdjacencyGraph empty();  // all states known, no edges
  // Tab- or space-separated "XX YY" pairs, '#' comments; a line with a
  // single code marks a state with no neighbours. Only states that appear
  // in the file are known to the loaded graph.
  static AdjacencyGraph from_file(const std::filesystem::path& path);

  void add_edge(StateLabel a, StateLabel b);  // self-loops are an error
  bool adjacent(StateLabel a, StateLabel b) const;
  bool knows(StateLabel s) const;
  int degree(StateLabel s) const;
  std::size_t edge_count() const;
  std::vector<std::pair<StateLabel, StateLabel>> edges() const;  // a < b, sorted

  void save(std::ostream& out) const;

private:
  std::array<std::array<bool, StateLabel::kCount>, StateLabel::kCount> adj_{};
  std::array<bool, StateLabel::kCount> known_{};
};

}  // namespace geostate
