#pragma once

#include <compare>
#include <cstdlib>
#include <functional>
#include <string>
#include <string_view>

namespace spinsemi {

// A spin label or magnetic quantum number, stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int value) : twice_(2 * value) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  // Accepts "3/2", "-1/2", "2", "1.5".  Throws std::invalid_argument.
  static HalfInt parse(std::string_view text);

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  // Dimension 2J+1 of the irrep labelled by this spin.
  constexpr int dim() const { return twice_ + 1; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  constexpr HalfInt& operator+=(HalfInt o) { twice_ += o.twice_; return *this; }
  constexpr HalfInt& operator-=(HalfInt o) { twice_ -= o.twice_; return *this; }
  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string str() const;

 private:
  int twice_ = 0;
};

constexpr HalfInt half(int twice) { return HalfInt::from_twice(twice); }

constexpr HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }

constexpr bool same_parity(HalfInt a, HalfInt b) { return (a.twice() - b.twice()) % 2 == 0; }

// Row index of magnetic number m in the basis |J>, |J-1>, ..., |-J>.
constexpr int index_of(HalfInt J, HalfInt m) { return (J.twice() - m.twice()) / 2; }
constexpr HalfInt magnetic(HalfInt J, int index) { return HalfInt::from_twice(J.twice() - 2 * index); }

// |J-K| <= M <= J+K with J+K+M integral.
constexpr bool triangle(HalfInt J, HalfInt K, HalfInt M) {
  return M >= abs(J - K) && M <= J + K && (J + K + M).is_integer();
}

}  // namespace spinsemi

template <>
struct std::hash<spinsemi::HalfInt> {
  std::size_t operator()(spinsemi::HalfInt h) const noexcept { return std::hash<int>()(h.twice()); }
};
