#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace cspec {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

}  // namespace cspec
