#include "geostate/adjacency.hpp"

#include <fstream>
#include <sstream>

#include "geostate/error.hpp"

namespace geostate {
namespace {

struct Border {
  const char* a;
  const char* b;
};

// Land borders of the 48 contiguous states, each pair once. The Four
// Corners point pairs are kept separate below.
constexpr Border kLandBorders[] = {
    {"AL", "FL"}, {"AL", "GA"}, {"AL", "MS"}, {"AL", "TN"}, {"AR", "LA"}, {"AR", "MO"},
    {"AR", "MS"}, {"AR", "OK"}, {"AR", "TN"}, {"AR", "TX"}, {"AZ", "CA"}, {"AZ", "NM"},
    {"AZ", "NV"}, {"AZ", "UT"}, {"CA", "NV"}, {"CA", "OR"}, {"CO", "KS"}, {"CO", "NE"},
    {"CO", "NM"}, {"CO", "OK"}, {"CO", "UT"}, {"CO", "WY"}, {"CT", "MA"}, {"CT", "NY"},
    {"CT", "RI"}, {"DE", "MD"}, {"DE", "NJ"}, {"DE", "PA"}, {"FL", "GA"}, {"GA", "NC"},
    {"GA", "SC"}, {"GA", "TN"}, {"IA", "IL"}, {"IA", "MN"}, {"IA", "MO"}, {"IA", "NE"},
    {"IA", "SD"}, {"IA", "WI"}, {"ID", "MT"}, {"ID", "NV"}, {"ID", "OR"}, {"ID", "UT"},
    {"ID", "WA"}, {"ID", "WY"}, {"IL", "IN"}, {"IL", "KY"}, {"IL", "MO"}, {"IL", "WI"},
    {"IN", "KY"}, {"IN", "MI"}, {"IN", "OH"}, {"KS", "MO"}, {"KS", "NE"}, {"KS", "OK"},
    {"KY", "MO"}, {"KY", "OH"}, {"KY", "TN"}, {"KY", "VA"}, {"KY", "WV"}, {"LA", "MS"},
    {"LA", "TX"}, {"MA", "NH"}, {"MA", "NY"}, {"MA", "RI"}, {"MA", "VT"}, {"MD", "PA"},
    {"MD", "VA"}, {"MD", "WV"}, {"ME", "NH"}, {"MI", "OH"}, {"MI", "WI"}, {"MN", "ND"},
    {"MN", "SD"}, {"MN", "WI"}, {"MO", "NE"}, {"MO", "OK"}, {"MO", "TN"}, {"MS", "TN"},
    {"MT", "ND"}, {"MT", "SD"}, {"MT", "WY"}, {"NC", "SC"}, {"NC", "TN"}, {"NC", "VA"},
    {"ND", "SD"}, {"NE", "SD"}, {"NE", "WY"}, {"NH", "VT"}, {"NJ", "NY"}, {"NJ", "PA"},
    {"NM", "OK"}, {"NM", "TX"}, {"NV", "OR"}, {"NV", "UT"}, {"NY", "PA"}, {"NY", "VT"},
    {"OH", "PA"}, {"OH", "WV"}, {"OK", "TX"}, {"OR", "WA"}, {"PA", "WV"}, {"SD", "WY"},
    {"TN", "VA"}, {"UT", "WY"}, {"VA", "WV"},
};

constexpr Border kCornerTouching[] = {{"AZ", "CO"}, {"NM", "UT"}};

StateLabel must_parse(std::string_view code, const std::string& context) {
  const auto s = StateLabel::parse(code);
  if (!s) throw Error("adjacency: unknown state " + std::string(code) + " " + context);
  return *s;
}

}  // namespace

AdjacencyGraph AdjacencyGraph::us_land_borders(bool include_corner_touching) {
  AdjacencyGraph g = empty();
  for (const auto& [a, b] : kLandBorders)
    g.add_edge(must_parse(a, "(builtin)"), must_parse(b, "(builtin)"));
  if (include_corner_touching)
    for (const auto& [a, b] : kCornerTouching)
      g.add_edge(must_parse(a, "(builtin)"), must_parse(b, "(builtin)"));
  return g;
}

AdjacencyGraph AdjacencyGraph::empty() {
  AdjacencyGraph g;
  g.known_.fill(true);
  return g;
}

AdjacencyGraph AdjacencyGraph::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open adjacency file: " + path.string());
  AdjacencyGraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string a, b;
    if (!(fields >> a)) continue;
    const std::string ctx = "(line " + std::to_string(line_no) + ")";
    const StateLabel sa = must_parse(a, ctx);
    if (!(fields >> b)) {
      // a single code marks a state with no neighbours
      g.known_[sa.index()] = true;
      continue;
    }
    std::string extra;
    if (fields >> extra) throw Error("adjacency file line " + std::to_string(line_no) + ": trailing fields");
    const StateLabel sb = must_parse(b, ctx);
    g.known_[sa.index()] = true;
    g.known_[sb.index()] = true;
    g.add_edge(sa, sb);
  }
  return g;
}

void AdjacencyGraph::add_edge(StateLabel a, StateLabel b) {
  if (a == b) throw Error("adjacency: self-loop on " + std::string(a.code()));
  adj_[a.index()][b.index()] = true;
  adj_[b.index()][a.index()] = true;
  known_[a.index()] = true;
  known_[b.index()] = true;
}

bool AdjacencyGraph::adjacent(StateLabel a, StateLabel b) const {
  if (!known_[a.index()]) throw Error("adjacency: state not in table: " + std::string(a.code()));
  if (!known_[b.index()]) throw Error("adjacency: state not in table: " + std::string(b.code()));
  return adj_[a.index()][b.index()];
}

bool AdjacencyGraph::knows(StateLabel s) const { return known_[s.index()]; }

int AdjacencyGraph::degree(StateLabel s) const {
  if (!known_[s.index()]) throw Error("adjacency: state not in table: " + std::string(s.code()));
  int d = 0;
  for (int j = 0; j < StateLabel::kCount; ++j) d += adj_[s.index()][j] ? 1 : 0;
  return d;
}

std::size_t AdjacencyGraph::edge_count() const {
  std::size_t n = 0;
  for (int i = 0; i < StateLabel::kCount; ++i)
    for (int j = i + 1; j < StateLabel::kCount; ++j) n += adj_[i][j] ? 1 : 0;
  return n;
}

std::vector<std::pair<StateLabel, StateLabel>> AdjacencyGraph::edges() const {
  std::vector<std::pair<StateLabel, StateLabel>> out;
  for (int i = 0; i < StateLabel::kCount; ++i)
    for (int j = i + 1; j < StateLabel::kCount; ++j)
      if (adj_[i][j]) out.emplace_back(StateLabel::from_index(i), StateLabel::from_index(j));
  return out;
}

void AdjacencyGraph::save(std::ostream& out) const {
  for (const auto& [a, b] : edges()) out << a.code() << '\t' << b.code() << '\n';
  for (int i = 0; i < StateLabel::kCount; ++i) {
    const StateLabel s = StateLabel::from_index(i);
    if (known_[i] && degree(s) == 0) out << s.code() << '\n';
  }
}

}  // namespace geostate
