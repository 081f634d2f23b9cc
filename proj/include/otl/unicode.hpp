#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace otl::unicode {

// Character classes used for token boundaries. `extend` covers combining
// marks, variation selectors and joiners, which take the class of the
// preceding character.
enum class CharClass { letter, digit, symbol, emoji, space, extend };

// Invalid byte sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);
void append_utf8(std::string& out, char32_t cp);

char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view text);

CharClass classify(char32_t cp);

bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);

// True for code points that start an emoji sequence (pictographs, dingbats,
// regional indicators).
bool is_emoji_base(char32_t cp);

// Given `pos` at an emoji base, returns one past the end of the sequence:
// the base plus any variation selectors, skin-tone modifiers, tag characters,
// and further bases joined with U+200D. A pair of regional indicators forms
// one flag.
std::size_t emoji_sequence_end(std::u32string_view text, std::size_t pos);

}  // namespace otl::unicode
