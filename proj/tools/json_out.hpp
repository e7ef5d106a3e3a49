#pragma once

#include <json.hpp>

#include <iosfwd>

namespace holq::cli {

/// Pretty-prints `j` with every floating-point number at 17 significant
/// digits. Non-finite numbers become null.
void dump_json(std::ostream& os, const nlohmann::ordered_json& j, int indent = 2);

}  // namespace holq::cli
