#include "bsdloc/bsd.hpp"

#include <stdexcept>

namespace bsdloc {

std::string Bsd::to_string() const {
  std::string s(4, '0');
  for (int i = 0; i < 4; ++i) s[i] = bit(i) ? '1' : '0';
  return s;
}

Bsd Bsd::parse(std::string_view text) {
  if (text.size() != 4) throw std::invalid_argument("Bsd::parse: expected 4 characters");
  std::uint8_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    if (text[i] == '1') {
      bits |= static_cast<std::uint8_t>(1U << i);
    } else if (text[i] != '0') {
      throw std::invalid_argument("Bsd::parse: expected '0' or '1'");
    }
  }
  return Bsd(bits);
}

}  // namespace bsdloc
