#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "geostate/corpus.hpp"

namespace geostate {

struct LoadResult {
  Corpus corpus;
  std::size_t lines_read = 0;
  std::size_t rejected_short = 0;         // cumulative text under min_chars
  std::size_t rejected_no_documents = 0;  // empty documents array
  std::vector<std::string> warnings;      // e.g. unknown fields, deduplicated
};

// Raw corpus input: UTF-8, one JSON object per line, fields user_id, state,
// media, documents[], optional gender/industry. Unknown fields are ignored
// with a warning. Users failing the minimum-character filter or carrying no
// documents are counted, not silently dropped. Malformed lines, unknown
// state labels, duplicate user ids and media mismatches are hard errors
// reported with their line number.
LoadResult load_corpus(const std::filesystem::path& path, Media media,
                       std::size_t min_chars = 600);

// Tokenized corpus artifact: one JSON object per user with token counts.
// save/load round-trips exactly; every pipeline command consumes this form.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_tokenized_corpus(const std::filesystem::path& path);

}  // namespace geostate
