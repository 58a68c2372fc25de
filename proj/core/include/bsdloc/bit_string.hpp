#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bsdloc {

using Word = std::uint64_t;

constexpr std::size_t words_for_bits(std::size_t bits) { return (bits + 63) / 64; }
constexpr std::size_t bytes_for_bits(std::size_t bits) { return (bits + 7) / 8; }

/// Word-wise XOR + popcount. Spans must have equal length; unused high bits
/// must be zero on both sides.
inline int hamming_words(std::span<const Word> a, std::span<const Word> b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::popcount(a[i] ^ b[i]);
  return d;
}

/// Bit string packed LSB-first into 64-bit words: bit k lives in word k/64 at
/// position k%64. Bits past size() are always zero.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t nbits) : nbits_(nbits), words_(words_for_bits(nbits), 0) {}

  /// Parses '0'/'1' characters; bit 0 is the first character.
  static BitString from_string(std::string_view text);

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }
  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool on) {
    const Word mask = Word{1} << (i % 64);
    if (on) {
      words_[i / 64] |= mask;
    } else {
      words_[i / 64] &= ~mask;
    }
  }
  void push_back(bool on);
  /// Appends the low `count` bits of `value`, least significant first.
  void append_bits(std::uint64_t value, std::size_t count);
  void append(const BitString& other);

  /// Bits [first, first + count) as a new string.
  BitString slice(std::size_t first, std::size_t count) const;

  std::string to_string() const;

  /// Little-endian byte serialization: byte b holds bits 8b..8b+7, LSB first.
  std::vector<std::uint8_t> to_bytes() const;
  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits);

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::size_t nbits_ = 0;
  std::vector<Word> words_;
};

/// Hamming distance; throws std::invalid_argument on length mismatch.
int hamming(const BitString& a, const BitString& b);

struct BitStringHash {
  std::size_t operator()(const BitString& s) const noexcept;
};

/// Byte-level (de)serialization of a packed word row, same layout as BitString::to_bytes.
std::vector<std::uint8_t> pack_bits_to_bytes(std::span<const Word> words, std::size_t nbits);
void unpack_bytes_to_words(std::span<const std::uint8_t> bytes, std::span<Word> out);

}  // namespace bsdloc
