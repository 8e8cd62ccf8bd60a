#include <cstdint>

#include "osintphish/features.hpp"

namespace osintphish {
namespace {

struct Range {
  char32_t lo, hi;
};

constexpr Range kLetters[] = {
    {0x41, 0x5A},     {0x61, 0x7A},     {0xAA, 0xAA},     {0xB5, 0xB5},     {0xBA, 0xBA},
    {0xC0, 0xD6},     {0xD8, 0xF6},     {0xF8, 0x2C1},    {0x370, 0x374},   {0x376, 0x37D},
    {0x386, 0x386},   {0x388, 0x3FF},   {0x400, 0x481},   {0x48A, 0x52F},   {0x531, 0x556},
    {0x561, 0x587},   {0x5D0, 0x5EA},   {0x620, 0x64A},   {0x66E, 0x66F},   {0x671, 0x6D3},
    {0x6D5, 0x6D5},   {0x6E5, 0x6E6},   {0x6EE, 0x6EF},   {0x6FA, 0x6FC},   {0x6FF, 0x6FF},
    {0x750, 0x77F},   {0x8A0, 0x8C9},   {0x904, 0x939},   {0x1E00, 0x1FFF}, {0x3040, 0x30FF},
    {0x4E00, 0x9FFF}, {0xAC00, 0xD7A3}, {0xFB50, 0xFDFB}, {0xFE70, 0xFEFC},
};

constexpr Range kDigits[] = {{0x30, 0x39}, {0x660, 0x669}, {0x6F0, 0x6F9}, {0x966, 0x96F}};

// Combining marks (Arabic harakat, Latin diacritics) continue a word.
constexpr Range kMarks[] = {
    {0x300, 0x36F}, {0x483, 0x489}, {0x591, 0x5BD}, {0x610, 0x61A}, {0x64B, 0x65F},
    {0x670, 0x670}, {0x6D6, 0x6DC}, {0x6DF, 0x6E4}, {0x6E7, 0x6E8}, {0x6EA, 0x6ED},
    {0x8D3, 0x8FF}, {0x93A, 0x94F},
};

template <std::size_t N>
bool in(const Range (&table)[N], char32_t cp) {
  for (const auto& r : table) {
    if (cp >= r.lo && cp <= r.hi) return true;
  }
  return false;
}

bool is_word_char(char32_t cp) { return in(kLetters, cp) || in(kDigits, cp); }

/// Lowercases Latin letters (ASCII, Latin-1, Latin Extended-A).
char32_t fold_latin(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) return cp | 1;
  if (cp >= 0x139 && cp <= 0x148 && (cp & 1)) return cp + 1;
  if (cp >= 0x179 && cp <= 0x17E && (cp & 1)) return cp + 1;
  if (cp == 0x178) return 0xFF;
  return cp;
}

/// Decodes one code point; malformed bytes yield U+FFFD and advance by one.
char32_t decode(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  auto bits = [&](std::size_t k) { return static_cast<char32_t>(s[i + k] & 0x3F); };
  if (b0 < 0x80) {
    i += 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    char32_t cp = ((b0 & 0x1F) << 6) | bits(1);
    i += 2;
    return cp >= 0x80 ? cp : 0xFFFD;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    char32_t cp = ((b0 & 0x0F) << 12) | (bits(1) << 6) | bits(2);
    i += 3;
    return cp >= 0x800 ? cp : 0xFFFD;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = ((b0 & 0x07) << 18) | (bits(1) << 12) | (bits(2) << 6) | bits(3);
    i += 4;
    return cp >= 0x10000 && cp <= 0x10FFFF ? cp : 0xFFFD;
  }
  i += 1;
  return 0xFFFD;
}

void encode(char32_t cp, std::string& out) {
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

}  // namespace

// The language tag does not change segmentation: Latin folding never touches
// Arabic code points, so mixed-script emails tokenize the same either way.
std::vector<std::string> tokenize(std::string_view body, Language) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < body.size()) {
    const char32_t cp = decode(body, i);
    if (is_word_char(cp)) {
      encode(fold_latin(cp), current);
    } else if (!current.empty() && in(kMarks, cp)) {
      encode(cp, current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace osintphish
