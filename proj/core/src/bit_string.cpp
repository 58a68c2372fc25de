#include "bsdloc/bit_string.hpp"

#include <stdexcept>

namespace bsdloc {

BitString BitString::from_string(std::string_view text) {
  BitString s(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1') {
      s.set(i, true);
    } else if (text[i] != '0') {
      throw std::invalid_argument("BitString::from_string: expected '0' or '1'");
    }
  }
  return s;
}

void BitString::push_back(bool on) {
  if (nbits_ % 64 == 0) words_.push_back(0);
  ++nbits_;
  set(nbits_ - 1, on);
}

void BitString::append_bits(std::uint64_t value, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) push_back((value >> i) & 1U);
}

void BitString::append(const BitString& other) {
  for (std::size_t i = 0; i < other.size(); ++i) push_back(other.get(i));
}

BitString BitString::slice(std::size_t first, std::size_t count) const {
  if (first + count > nbits_) throw std::out_of_range("BitString::slice");
  BitString out(count);
  for (std::size_t i = 0; i < count; ++i) out.set(i, get(first + i));
  return out;
}

std::string BitString::to_string() const {
  std::string s(nbits_, '0');
  for (std::size_t i = 0; i < nbits_; ++i) s[i] = get(i) ? '1' : '0';
  return s;
}

std::vector<std::uint8_t> BitString::to_bytes() const { return pack_bits_to_bytes(words_, nbits_); }

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
  if (bytes.size() != bytes_for_bits(nbits)) {
    throw std::invalid_argument("BitString::from_bytes: byte count does not match bit length");
  }
  BitString s(nbits);
  unpack_bytes_to_words(bytes, s.words_);
  if (nbits % 64 != 0 && !s.words_.empty()) {
    s.words_.back() &= (Word{1} << (nbits % 64)) - 1;
  }
  return s;
}

int hamming(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming: bit length mismatch");
  return hamming_words(a.words(), b.words());
}

std::size_t BitStringHash::operator()(const BitString& s) const noexcept {
  // FNV-1a over the words and the length
  std::uint64_t h = 14695981039346656037ULL ^ s.size();
  for (Word w : s.words()) {
    h ^= w;
    h *= 1099511628211ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

std::vector<std::uint8_t> pack_bits_to_bytes(std::span<const Word> words, std::size_t nbits) {
  std::vector<std::uint8_t> out(bytes_for_bits(nbits), 0);
  for (std::size_t b = 0; b < out.size(); ++b) {
    out[b] = static_cast<std::uint8_t>(words[b / 8] >> (8 * (b % 8)));
  }
  return out;
}

void unpack_bytes_to_words(std::span<const std::uint8_t> bytes, std::span<Word> out) {
  for (auto& w : out) w = 0;
  for (std::size_t b = 0; b < bytes.size(); ++b) {
    out[b / 8] |= static_cast<Word>(bytes[b]) << (8 * (b % 8));
  }
}

}  // namespace bsdloc
