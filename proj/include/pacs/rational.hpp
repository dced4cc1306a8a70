#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace pacs {

/// Exact arithmetic for population weights and enumeration identities.
/// Anything Monte-Carlo uses doubles; anything asserted as an identity
/// uses this.
using Rational = boost::multiprecision::cpp_rational;

/// Exact value of the binary double (not a decimal reinterpretation):
/// rational_from_double(0.3) is 0.3's exact IEEE value.
Rational rational_from_double(double x);

/// Accepts "3/10", "0.35", "7", with optional sign. Decimal strings are
/// read exactly (35/100), unlike doubles.
Rational rational_from_string(const std::string& s);

double to_double(const Rational& r);

std::string to_string(const Rational& r);

}  // namespace pacs
