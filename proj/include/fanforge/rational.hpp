#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace fanforge {

using Rational = mpq_class;
using Integer = mpz_class;

// "p/q" or "p"; throws ParseError on malformed input.
// Canonical p/q (mpq_class(p, q) itself does not reduce).
inline Rational frac(const Integer& p, const Integer& q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

Rational parse_rational(const std::string& text);
// Canonical "p/q"; integers print without a denominator.
std::string to_string(const Rational& q);

// Fixed-point decimal with `digits` fractional digits, rounded half away from zero,
// trailing zeros trimmed.
std::string to_decimal(const Rational& q, int digits = 12);
// Smallest decimal with `digits` fractional digits that is >= q.
std::string to_decimal_upper(const Rational& q, int digits = 12);

Rational pow(const Rational& base, long exp);
Rational pow3_inv(long n);  // 3^{-n}
Integer ipow(long base, unsigned long exp);

Rational rmin(const Rational& a, const Rational& b);
Rational rmax(const Rational& a, const Rational& b);
Rational rabs(const Rational& a);

// Ternary digits after the point; false when the expansion does not
// terminate within max_len digits.
bool finite_ternary(const Rational& x, std::vector<int>& digits, int max_len = 4096);
// True iff x has a finite ternary expansion using only digits 0 and 2.
bool is_cantor_left_endpoint(const Rational& x);
// Number of ternary digits of x (0 for x = 0); requires a finite expansion.
int ternary_length(const Rational& x);

// lower <= sqrt(q) <= upper, both dyadic with `bits` fractional bits.
void sqrt_bounds(const Rational& q, Rational& lower, Rational& upper, int bits = 64);

double to_double(const Rational& q);

}  // namespace fanforge
