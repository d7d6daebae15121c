#include "geostate/tokenize.hpp"

#include <vector>

namespace geostate {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one UTF-8 sequence starting at i, advancing i. Malformed input
// yields U+FFFD for the offending byte.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char b0 = byte(i);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return kReplacement;
  }
  if (i + len > s.size()) {
    ++i;
    return kReplacement;
  }
  for (int k = 1; k < len; ++k) {
    const unsigned char bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += len;
  if (cp >= 0xD800 && cp <= 0xDFFF) return kReplacement;
  if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000))
    return kReplacement;  // overlong
  return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_whitespace(char32_t c) {
  if (c == 0x20 || (c >= 0x09 && c <= 0x0D)) return true;
  switch (c) {
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      break;
  }
  return c >= 0x2000 && c <= 0x200A;
}

// Token alphabet: ASCII letters/digits plus ' - & ; and, beyond ASCII, any
// code point that is not whitespace or common punctuation.
bool is_token_char(char32_t c) {
  if (c < 0x80) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
    return c == '\'' || c == '-' || c == '&' || c == ';';
  }
  if (is_whitespace(c)) return false;
  if (c >= 0xA1 && c <= 0xBF) return c == 0xAA || c == 0xB5 || c == 0xBA;  // Latin-1 punctuation
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x206F) return false;  // general punctuation
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  if (c >= 0xFE50 && c <= 0xFE6F) return false;
  if (c >= 0xFF00 && c <= 0xFF0F) return false;  // fullwidth punctuation
  if (c >= 0xFF1A && c <= 0xFF20) return false;
  if (c >= 0xFF3B && c <= 0xFF40) return false;
  if (c >= 0xFF5B && c <= 0xFF65) return false;
  return c != kReplacement;
}

// Simple one-to-one case folding for the Latin, Greek and Cyrillic ranges;
// identity elsewhere.
char32_t fold_case(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 0x20;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if ((c >= 0x100 && c <= 0x137) || (c >= 0x14A && c <= 0x177)) return (c % 2 == 0) ? c + 1 : c;
  if ((c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E)) return (c % 2 == 1) ? c + 1 : c;
  if (c == 0x178) return 0xFF;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  return c;
}

bool match_ascii_ci(const std::vector<char32_t>& cps, std::size_t pos, std::string_view lit) {
  if (pos + lit.size() > cps.size()) return false;
  for (std::size_t k = 0; k < lit.size(); ++k) {
    char32_t c = cps[pos + k];
    if (c >= 'A' && c <= 'Z') c += 0x20;
    if (c != static_cast<char32_t>(lit[k])) return false;
  }
  return true;
}

bool is_url_start(const std::vector<char32_t>& cps, std::size_t pos) {
  return match_ascii_ci(cps, pos, "http://") || match_ascii_ci(cps, pos, "https://") ||
         match_ascii_ci(cps, pos, "www.");
}

}  // namespace

std::size_t count_codepoints(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size(); ++n) decode_utf8(text, i);
  return n;
}

TokenCounts tokenize(std::string_view text, TokenProfile profile) {
  std::vector<char32_t> cps;
  cps.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) cps.push_back(decode_utf8(text, i));

  TokenCounts out;
  const bool tweet = profile == TokenProfile::tweet;
  std::size_t i = 0;
  const std::size_t n = cps.size();
  while (i < n) {
    const char32_t c = cps[i];
    if (is_token_char(c)) {
      if (is_url_start(cps, i)) {
        while (i < n && !is_whitespace(cps[i])) ++i;
        continue;
      }
      std::size_t j = i;
      while (j < n && is_token_char(cps[j])) ++j;
      const bool retweet_marker = tweet && j - i == 2 && cps[i] == 'R' && cps[i + 1] == 'T';
      if (!retweet_marker) {
        std::string token;
        for (std::size_t k = i; k < j; ++k) encode_utf8(fold_case(cps[k]), token);
        ++out[token];
      }
      i = j;
    } else if (tweet && (c == '@' || c == '#') && i + 1 < n && is_token_char(cps[i + 1])) {
      ++i;  // mention or hashtag: drop the whole following run
      while (i < n && is_token_char(cps[i])) ++i;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace geostate
