#include "geostate/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "geostate/error.hpp"

namespace geostate {
namespace {

using nlohmann::json;

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw Error("line " + std::to_string(line) + ": " + what);
}

TokenProfile profile_for(Media media) {
  return media == Media::tweet ? TokenProfile::tweet : TokenProfile::blog;
}

json user_to_json(const TokenizedUser& u) {
  json j;
  j["user_id"] = u.user_id;
  j["state"] = std::string(u.state.code());
  j["media"] = std::string(to_string(u.media));
  json tokens = json::object();
  for (const auto& [word, count] : u.tokens) tokens[word] = count;
  j["tokens"] = std::move(tokens);
  j["doc_char_counts"] = u.doc_char_counts;
  j["char_count"] = u.char_count;
  if (u.gender) j["gender"] = std::string(to_string(*u.gender));
  if (!u.industry.empty()) j["industry"] = u.industry;
  return j;
}

}  // namespace

LoadResult load_corpus(const std::filesystem::path& path, Media media, std::size_t min_chars) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path.string());

  LoadResult result;
  result.corpus.media = media;
  result.corpus.provenance = path.filename().string();

  std::set<std::string> seen_ids;
  std::set<std::string> warned;
  static const std::set<std::string> known_fields = {"user_id", "state",  "media",
                                                     "documents", "gender", "industry"};

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ++result.lines_read;

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      fail_line(line_no, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object()) fail_line(line_no, "record is not an object");

    for (const auto& [key, value] : rec.items()) {
      if (!known_fields.count(key) && !warned.count(key)) {
        warned.insert(key);
        result.warnings.push_back("unknown field ignored: " + key);
      }
    }

    if (!rec.contains("user_id") || !rec["user_id"].is_string())
      fail_line(line_no, "missing or non-string user_id");
    if (!rec.contains("state") || !rec["state"].is_string())
      fail_line(line_no, "missing or non-string state");
    if (!rec.contains("media") || !rec["media"].is_string())
      fail_line(line_no, "missing or non-string media");
    if (!rec.contains("documents") || !rec["documents"].is_array())
      fail_line(line_no, "missing or non-array documents");

    TokenizedUser user;
    user.user_id = rec["user_id"].get<std::string>();
    if (user.user_id.empty()) fail_line(line_no, "empty user_id");
    if (!seen_ids.insert(user.user_id).second)
      fail_line(line_no, "duplicate user_id: " + user.user_id);

    const auto state = StateLabel::parse(rec["state"].get<std::string>());
    if (!state) fail_line(line_no, "unknown state label: " + rec["state"].get<std::string>());
    user.state = *state;

    const auto rec_media = parse_media(rec["media"].get<std::string>());
    if (!rec_media || *rec_media == Media::mixed)
      fail_line(line_no, "unknown media: " + rec["media"].get<std::string>());
    if (media != Media::mixed && *rec_media != media)
      fail_line(line_no, "media mismatch: record is " + std::string(to_string(*rec_media)) +
                             ", corpus declared " + std::string(to_string(media)));
    user.media = *rec_media;

    if (rec.contains("gender")) {
      if (!rec["gender"].is_string()) fail_line(line_no, "non-string gender");
      const auto g = parse_gender(rec["gender"].get<std::string>());
      if (!g) fail_line(line_no, "unknown gender: " + rec["gender"].get<std::string>());
      user.gender = *g;
    }
    if (rec.contains("industry")) {
      if (!rec["industry"].is_string()) fail_line(line_no, "non-string industry");
      user.industry = rec["industry"].get<std::string>();
    }

    const auto& docs = rec["documents"];
    if (docs.empty()) {
      ++result.rejected_no_documents;
      continue;
    }
    std::uint64_t total_chars = 0;
    for (const auto& doc : docs) {
      if (!doc.is_string()) fail_line(line_no, "non-string document");
      const auto& text = doc.get_ref<const std::string&>();
      const std::size_t chars = count_codepoints(text);
      user.doc_char_counts.push_back(static_cast<std::uint32_t>(chars));
      total_chars += chars;
      for (const auto& [word, count] : tokenize(text, profile_for(user.media)))
        user.tokens[word] += count;
    }
    user.char_count = total_chars;
    if (total_chars < min_chars) {
      ++result.rejected_short;
      continue;
    }
    result.corpus.users.push_back(std::move(user));
  }
  return result;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file: " + path.string());
  json header;
  header["format"] = "geostate-corpus";
  header["version"] = 1;
  header["media"] = std::string(to_string(corpus.media));
  header["provenance"] = corpus.provenance;
  header["users"] = corpus.users.size();
  out << header.dump() << '\n';
  for (const auto& u : corpus.users) out << user_to_json(u).dump() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

Corpus load_tokenized_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error("empty corpus file: " + path.string());

  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    throw Error("line 1: malformed header: " + std::string(e.what()));
  }
  if (!header.is_object() || header.value("format", "") != "geostate-corpus")
    throw Error(path.string() + ": not a tokenized corpus artifact");
  if (header.value("version", 0) != 1) throw Error(path.string() + ": unsupported version");

  Corpus corpus;
  const auto media = parse_media(header.value("media", ""));
  if (!media) throw Error(path.string() + ": bad media tag in header");
  corpus.media = *media;
  corpus.provenance = header.value("provenance", "");

  std::set<std::string> seen_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      fail_line(line_no, std::string("malformed record: ") + e.what());
    }
    TokenizedUser user;
    user.user_id = rec.at("user_id").get<std::string>();
    if (!seen_ids.insert(user.user_id).second)
      fail_line(line_no, "duplicate user_id: " + user.user_id);
    const auto state = StateLabel::parse(rec.at("state").get<std::string>());
    if (!state) fail_line(line_no, "unknown state label");
    user.state = *state;
    const auto rec_media = parse_media(rec.at("media").get<std::string>());
    if (!rec_media) fail_line(line_no, "unknown media");
    user.media = *rec_media;
    for (const auto& [word, count] : rec.at("tokens").items())
      user.tokens[word] = count.get<std::uint32_t>();
    user.doc_char_counts = rec.at("doc_char_counts").get<std::vector<std::uint32_t>>();
    user.char_count = rec.at("char_count").get<std::uint64_t>();
    if (rec.contains("gender")) {
      const auto g = parse_gender(rec["gender"].get<std::string>());
      if (!g) fail_line(line_no, "unknown gender");
      user.gender = *g;
    }
    if (rec.contains("industry")) user.industry = rec["industry"].get<std::string>();
    corpus.users.push_back(std::move(user));
  }
  return corpus;
}

}  // namespace geostate
