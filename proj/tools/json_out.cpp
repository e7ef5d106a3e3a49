#include "json_out.hpp"

#include "holq/tensor_io.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace holq::cli {

namespace {

void write(std::ostream& os, const nlohmann::ordered_json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        std::string s = format_double(v);
        // keep it a float on re-read
        if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
        os << s;
      } else {
        os << "null";
      }
      return;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << nlohmann::json(key).dump() << ": ";
        write(os, value, indent, depth + 1);
      }
      os << '\n' << close_pad << '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // short arrays of scalars stay on one line
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      if (flat) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], indent, depth + 1);
        }
        os << ']';
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write(os, j[i], indent, depth + 1);
      }
      os << '\n' << close_pad << ']';
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

void dump_json(std::ostream& os, const nlohmann::ordered_json& j, int indent) {
  write(os, j, indent, 0);
  os << '\n';
}

}  // namespace holq::cli
