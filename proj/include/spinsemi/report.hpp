#pragma once

#include <string>

#include <json.hpp>

#include "spinsemi/half_int.hpp"

namespace spinsemi {

using Json = nlohmann::ordered_json;

// Scientific notation with 17 significant digits, independent of the locale; "inf", "-inf", "nan" otherwise.
std::string format_number(double x);

// JSON text where every floating value goes through format_number (non-finite values become strings).
std::string dump_report(const Json& report);

inline Json half_json(HalfInt h) { return h.str(); }

}  // namespace spinsemi
