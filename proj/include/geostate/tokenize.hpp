#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace geostate {

enum class TokenProfile { blog, tweet };

using TokenCounts = std::map<std::string, std::uint32_t>;

// Lowercased token multiset of a text.
//
// A token is a maximal run of letters, digits, or ' - & ; so escaped HTML
// entities ("&gt;") survive as written. Every other character separates
// tokens. URL-shaped words (http://, https://, www.) are dropped whole under
// both profiles. The tweet profile additionally drops @mentions, #hashtags
// and the bare retweet marker "RT". Case is folded per simple one-to-one
// Unicode mappings (Latin, Greek, Cyrillic).
TokenCounts tokenize(std::string_view text, TokenProfile profile);

// Code points in a UTF-8 string; malformed bytes count one each.
std::size_t count_codepoints(std::string_view text);

}  // namespace geostate
