#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace gce {

using Rational = mpq_class;

// Accepts "p", "-p" and "p/q"; anything with a decimal point or exponent is rejected.
Rational parse_rational(std::string_view text);

// Always "p/q", including integers ("1/1", "0/1").
std::string to_string(const Rational& r);

inline Rational rat(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline const Rational& min_of(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max_of(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Truncated addition on [0,1].
inline Rational clipped_sum(const Rational& a, const Rational& b) {
    Rational s = a + b;
    return s > 1 ? Rational(1) : s;
}

}  // namespace gce
