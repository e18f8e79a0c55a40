#include "spinsemi/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace spinsemi {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

namespace {

void emit(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close_pad(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      // Small records of scalars stay on one line.
      if (j.size() <= 12 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); })) {
        out += "{";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
          if (!first) out += ", ";
          first = false;
          out += Json(it.key()).dump() + ": ";
          emit(it.value(), out, depth + 1);
        }
        out += "}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        emit(it.value(), out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Short arrays of scalars stay on one line.
      bool flat = j.size() <= 8 && std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        emit(e, out, depth + 1);
      }
      out += flat ? "]" : "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      double x = j.get<double>();
      out += std::isfinite(x) ? format_number(x) : Json(format_number(x)).dump();
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_report(const Json& report) {
  std::string out;
  emit(report, out, 0);
  out += "\n";
  return out;
}

}  // namespace spinsemi
