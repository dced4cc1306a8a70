#include "pacs/rational.hpp"

#include <cmath>

#include "pacs/errors.hpp"

namespace pacs {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw Error("weight is not finite");
  return Rational(x);
}

Rational rational_from_string(const std::string& s) {
  auto fail = [&] { throw Error("cannot parse rational: '" + s + "'"); };
  std::string t = s;
  bool neg = false;
  if (!t.empty() && (t[0] == '+' || t[0] == '-')) {
    neg = t[0] == '-';
    t.erase(0, 1);
  }
  if (t.empty()) fail();
  auto digits = [&](const std::string& d) {
    if (d.empty()) fail();
    for (char c : d)
      if (c < '0' || c > '9') fail();
  };
  Rational r;
  size_t slash = t.find('/');
  size_t dot = t.find('.');
  if (slash != std::string::npos) {
    std::string num = t.substr(0, slash), den = t.substr(slash + 1);
    digits(num);
    digits(den);
    boost::multiprecision::cpp_int d(den);
    if (d == 0) fail();
    r = Rational(boost::multiprecision::cpp_int(num), d);
  } else if (dot != std::string::npos) {
    std::string whole = t.substr(0, dot), frac = t.substr(dot + 1);
    if (whole.empty()) whole = "0";
    digits(whole);
    digits(frac);
    boost::multiprecision::cpp_int scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    r = Rational(boost::multiprecision::cpp_int(whole + frac), scale);
  } else {
    digits(t);
    r = Rational(boost::multiprecision::cpp_int(t));
  }
  return neg ? -r : r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) { return r.str(); }

}  // namespace pacs
