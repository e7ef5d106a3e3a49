#pragma once

#include "holq/tensor.hpp"

#include <iosfwd>
#include <string>

namespace holq {

// Text format:
//
//   tensor K d1 d2 ... dK
//   v v v ...
//
// The header sits on the first line; the remaining whitespace-separated
// values are in vectorization order (first mode fastest). The writer emits
// 17 significant digits so values round-trip exactly, one mode-1 fiber per
// line.

void write_tensor(std::ostream& os, const Tensor& t);
Tensor read_tensor(std::istream& is);

void write_tensor_file(const std::string& path, const Tensor& t);
Tensor read_tensor_file(const std::string& path);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace holq
