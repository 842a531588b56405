#pragma once

#include <string>

#include "lp/field.hpp"

namespace lp {

// PFLD field file: 8-byte magic "PFLD0001", one line of JSON metadata
// (d, n, band, desc) terminated by '\n', then n^d little-endian doubles in
// row-major order.
void write_pfld(const Field& f, const std::string& path, const std::string& desc = "");
Field read_pfld(const std::string& path);

// tool version string baked in at build time
const char* version();

}  // namespace lp
