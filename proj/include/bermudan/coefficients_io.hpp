#pragma once

#include <iosfwd>
#include <string>

#include "bermudan/dual_engine.hpp"

namespace bermudan {

inline constexpr int kCoefficientsFormatVersion = 1;

// JSON document with the format version, basis hash and description,
// training metadata and per-date coefficient arrays. Numbers round-trip exactly.
void write_coefficients(std::ostream& out, const DualCoefficients& coeffs,
                        const std::string& basis_description);
void write_coefficients_file(const std::string& path, const DualCoefficients& coeffs,
                             const std::string& basis_description);

// Throws ValidationError on malformed input or an unknown version.
DualCoefficients read_coefficients(std::istream& in, const std::string& source = "<stream>");
DualCoefficients read_coefficients_file(const std::string& path);

}  // namespace bermudan
