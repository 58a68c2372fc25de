#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace bsdloc {

enum class View : std::uint8_t { kFront = 0, kBack = 1, kLeft = 2, kRight = 3 };

inline constexpr std::array<View, 4> kAllViews = {View::kFront, View::kBack, View::kLeft,
                                                  View::kRight};

/// Offset of the view axis from the travel heading, counter-clockwise.
constexpr double view_axis_offset_deg(View v) {
  switch (v) {
    case View::kFront: return 0.0;
    case View::kBack: return 180.0;
    case View::kLeft: return 90.0;
    case View::kRight: return -90.0;
  }
  return 0.0;
}

/// 4-bit binary semantic descriptor.
///
/// Bit i of `bits()` corresponds to View(i): bit 0 junction-front, bit 1
/// junction-back, bit 2 gap-left, bit 3 gap-right. The text form lists the
/// bits in that order, so "1000" means a junction ahead and nothing else.
class Bsd {
 public:
  constexpr Bsd() = default;
  constexpr explicit Bsd(std::uint8_t bits) : bits_(bits & 0x0F) {}
  constexpr Bsd(bool junction_front, bool junction_back, bool gap_left, bool gap_right)
      : bits_(static_cast<std::uint8_t>(junction_front | (junction_back << 1) |
                                        (gap_left << 2) | (gap_right << 3))) {}

  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool get(View v) const { return (bits_ >> static_cast<int>(v)) & 1U; }
  constexpr bool bit(int i) const { return (bits_ >> i) & 1U; }
  constexpr void set(View v, bool on) {
    const auto mask = static_cast<std::uint8_t>(1U << static_cast<int>(v));
    bits_ = on ? (bits_ | mask) : (bits_ & ~mask & 0x0F);
  }

  /// "jf jb gl gr" as four '0'/'1' characters.
  std::string to_string() const;
  /// Inverse of to_string; throws std::invalid_argument on anything else.
  static Bsd parse(std::string_view text);

  friend constexpr bool operator==(Bsd, Bsd) = default;

 private:
  std::uint8_t bits_ = 0;
};

/// Descriptor seen when travelling the opposite way: front<->back, left<->right.
constexpr Bsd reverse_bsd(Bsd d) {
  const std::uint8_t b = d.bits();
  return Bsd(static_cast<std::uint8_t>(((b & 0b0101) << 1) | ((b & 0b1010) >> 1)));
}

constexpr int bsd_hamming(Bsd a, Bsd b) {
  return __builtin_popcount(static_cast<unsigned>(a.bits() ^ b.bits()));
}

}  // namespace bsdloc
