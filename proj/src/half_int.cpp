#include "spinsemi/half_int.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "spinsemi/errors.hpp"

namespace spinsemi {

namespace {

bool parse_int(std::string_view s, int& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

HalfInt HalfInt::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) throw ValidationError("empty half-integer");
  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    int num = 0, den = 0;
    if (!parse_int(text.substr(0, slash), num) || !parse_int(text.substr(slash + 1), den) || (den != 1 && den != 2))
      throw ValidationError("not a half-integer: " + std::string(text));
    return from_twice(den == 2 ? num : 2 * num);
  }
  int whole = 0;
  if (parse_int(text, whole)) return HalfInt(whole);
  double v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || std::abs(2 * v - std::round(2 * v)) > 1e-12)
    throw ValidationError("not a half-integer: " + std::string(text));
  return from_twice(static_cast<int>(std::lround(2 * v)));
}

std::string HalfInt::str() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

}  // namespace spinsemi
