#include "ambig/text_norm.hpp"

#include <cctype>
#include <cstdint>

namespace ambig {
namespace {

// Decodes one UTF-8 code point starting at i. Permissive: malformed bytes are
// passed through individually.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int length = 0;
  std::uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    length = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    length = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    length = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  if (i + length > s.size()) {
    ++i;
    return b0;
  }
  for (int k = 1; k < length; ++k) {
    const unsigned char bk = static_cast<unsigned char>(s[i + k]);
    if ((bk & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += length;
  return cp;
}

void encode_utf8(std::string& out, std::uint32_t cp) {
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

// Compatibility folding for typographic characters that leak into web-sourced
// text. Returns 0 for characters to drop outright.
std::uint32_t fold(std::uint32_t cp) {
  switch (cp) {
    case 0x2018:  // curly single quotes, primes, modifier apostrophes
    case 0x2019:
    case 0x201A:
    case 0x201B:
    case 0x2032:
    case 0x02B9:
    case 0x02BC:
    case 0x00B4:
      return '\'';
    case 0x201C:  // curly double quotes, guillemets
    case 0x201D:
    case 0x201E:
    case 0x201F:
    case 0x00AB:
    case 0x00BB:
      return '"';
    case 0x2010:  // hyphens, dashes, minus
    case 0x2011:
    case 0x2012:
    case 0x2013:
    case 0x2014:
    case 0x2015:
    case 0x2212:
      return '-';
    case 0x2026:
      return '.';
    case 0x00A0:  // non-breaking and typographic spaces
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return ' ';
    case 0x200B:  // zero-width characters, BOM
    case 0x200C:
    case 0x200D:
    case 0xFEFF:
      return 0;
    default:
      if (cp >= 0x2000 && cp <= 0x200A) return ' ';
      if (cp >= 0xFF01 && cp <= 0xFF5E) return cp - 0xFEE0;  // fullwidth ASCII
      return cp;
  }
}

bool is_separator(std::uint32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\v' || cp == '\f';
}

bool is_ascii_punct(std::uint32_t cp) {
  return cp < 0x80 && std::ispunct(static_cast<int>(cp));
}

std::uint32_t to_lower(std::uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;  // Latin-1 letters
  return cp;
}

std::vector<std::string> core_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::uint32_t cp = fold(decode_utf8(text, i));
    if (cp == 0) continue;
    if (is_separator(cp)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      continue;
    }
    if (is_ascii_punct(cp)) continue;
    encode_utf8(current, to_lower(cp));
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

bool is_article(std::string_view token) {
  return token == "a" || token == "an" || token == "the";
}

}  // namespace

std::string normalize_answer(std::string_view text) {
  std::string out;
  for (auto& token : core_tokens(text)) {
    if (is_article(token)) continue;
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

std::vector<std::string> tokenize_question(std::string_view text) {
  return core_tokens(text);
}

bool answer_match(std::string_view prediction, std::span<const std::string> gold) {
  const std::string normalized = normalize_answer(prediction);
  for (const auto& g : gold) {
    if (normalize_answer(g) == normalized) return true;
  }
  return false;
}

}  // namespace ambig
