#include "otl/unicode.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace otl::unicode {

namespace {

using Range = std::pair<char32_t, char32_t>;

// Emoji blocks: Emoticons, Misc Symbols & Pictographs, Transport & Map,
// Supplemental Symbols & Pictographs, Symbols & Pictographs Ext-A,
// regional indicators, plus the BMP Misc Symbols / Dingbats blocks and a few
// stray pictographs that render as emoji by default.
constexpr std::array<Range, 16> kEmojiRanges{{
    {0x231A, 0x231B},
    {0x23E9, 0x23F3},
    {0x23F8, 0x23FA},
    {0x2600, 0x26FF},
    {0x2700, 0x27BF},
    {0x2B1B, 0x2B1C},
    {0x2B50, 0x2B50},
    {0x2B55, 0x2B55},
    {0x1F004, 0x1F004},
    {0x1F0CF, 0x1F0CF},
    {0x1F1E6, 0x1F1FF},
    {0x1F300, 0x1F5FF},
    {0x1F600, 0x1F64F},
    {0x1F680, 0x1F6FF},
    {0x1F900, 0x1F9FF},
    {0x1FA70, 0x1FAFF},
}};

constexpr std::array<Range, 27> kLetterRanges{{
    {'A', 'Z'},         {'a', 'z'},         {0x00AA, 0x00AA},   {0x00B5, 0x00B5},
    {0x00BA, 0x00BA},   {0x00C0, 0x00D6},   {0x00D8, 0x00F6},   {0x00F8, 0x02AF},
    {0x0370, 0x0374},   {0x0376, 0x037D},   {0x0386, 0x0386},   {0x0388, 0x03FF},
    {0x0400, 0x0481},   {0x048A, 0x052F},   {0x0531, 0x0556},   {0x0561, 0x0587},
    {0x05D0, 0x05EA},   {0x0620, 0x064A},   {0x0900, 0x0DFF},   {0x0E00, 0x0E7F},
    {0x1E00, 0x1FFF},   {0x3040, 0x30FF},   {0x3400, 0x4DBF},   {0x4E00, 0x9FFF},
    {0xAC00, 0xD7AF},   {0xFF21, 0xFF3A},   {0xFF41, 0xFF5A},
}};

constexpr std::array<Range, 4> kDigitRanges{{
    {'0', '9'}, {0x0660, 0x0669}, {0x06F0, 0x06F9}, {0xFF10, 0xFF19},
}};

constexpr std::array<Range, 10> kSpaceRanges{{
    {0x0009, 0x000D}, {0x0020, 0x0020}, {0x0085, 0x0085}, {0x00A0, 0x00A0},
    {0x1680, 0x1680}, {0x2000, 0x200A}, {0x2028, 0x2029}, {0x202F, 0x202F},
    {0x205F, 0x205F}, {0x3000, 0x3000},
}};

constexpr std::array<Range, 13> kExtendRanges{{
    {0x0300, 0x036F}, {0x0483, 0x0489}, {0x0591, 0x05BD}, {0x064B, 0x065F},
    {0x1AB0, 0x1AFF}, {0x1DC0, 0x1DFF}, {0x200C, 0x200D}, {0x20D0, 0x20FF},
    {0xFE00, 0xFE0F}, {0xFE20, 0xFE2F}, {0x1F3FB, 0x1F3FF}, {0xE0020, 0xE007F},
    {0xE0100, 0xE01EF},
}};

template <std::size_t N>
bool in_ranges(const std::array<Range, N>& ranges, char32_t cp) {
  // Tables are sorted by start.
  auto it = std::upper_bound(ranges.begin(), ranges.end(), cp,
                             [](char32_t c, const Range& r) { return c < r.first; });
  if (it == ranges.begin()) return false;
  --it;
  return cp >= it->first && cp <= it->second;
}

bool is_regional_indicator(char32_t cp) { return cp >= 0x1F1E6 && cp <= 0x1F1FF; }
bool is_skin_tone(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }
bool is_emoji_trailer(char32_t cp) {
  return cp == 0xFE0F || cp == 0xFE0E || cp == 0x20E3 || is_skin_tone(cp) ||
         (cp >= 0xE0020 && cp <= 0xE007F);
}

}  // namespace

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    auto b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
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

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) append_utf8(out, cp);
  return out;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp == 0x130) return U'i';
  if (cp == 0x178) return 0xFF;
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177))
    return (cp % 2 == 0) ? cp + 1 : cp;
  if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E))
    return (cp % 2 == 1) ? cp + 1 : cp;
  if ((cp >= 0x391 && cp <= 0x3A1) || (cp >= 0x3A3 && cp <= 0x3AB)) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp == 0x1E9E) return 0xDF;
  if ((cp >= 0x1E00 && cp <= 0x1E95) || (cp >= 0x1EA0 && cp <= 0x1EFF))
    return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0xFF21 && cp <= 0xFF3A) return cp + 32;
  return cp;
}

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : decode_utf8(text)) append_utf8(out, to_lower(cp));
  return out;
}

bool is_letter(char32_t cp) { return in_ranges(kLetterRanges, cp); }
bool is_digit(char32_t cp) { return in_ranges(kDigitRanges, cp); }
bool is_space(char32_t cp) { return in_ranges(kSpaceRanges, cp); }

bool is_emoji_base(char32_t cp) {
  return in_ranges(kEmojiRanges, cp);
}

CharClass classify(char32_t cp) {
  if (is_space(cp)) return CharClass::space;
  if (is_digit(cp)) return CharClass::digit;
  if (is_letter(cp)) return CharClass::letter;
  // Skin tones sit inside the pictograph block but only modify a base.
  if (in_ranges(kExtendRanges, cp)) return CharClass::extend;
  if (is_emoji_base(cp)) return CharClass::emoji;
  return CharClass::symbol;
}

std::size_t emoji_sequence_end(std::u32string_view text, std::size_t pos) {
  const std::size_t n = text.size();
  if (pos >= n) return pos;
  if (is_regional_indicator(text[pos])) {
    if (pos + 1 < n && is_regional_indicator(text[pos + 1])) return pos + 2;
    return pos + 1;
  }
  std::size_t i = pos + 1;
  while (i < n) {
    if (is_emoji_trailer(text[i])) {
      ++i;
    } else if (text[i] == 0x200D && i + 1 < n && is_emoji_base(text[i + 1]) &&
               !is_regional_indicator(text[i + 1])) {
      i += 2;
    } else {
      break;
    }
  }
  return i;
}

}  // namespace otl::unicode
