#include "fanforge/rational.hpp"

#include <cctype>

#include "fanforge/errors.hpp"

namespace fanforge {

namespace {

bool parse_int(const std::string& s, Integer& out) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (std::size_t k = i; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  return out.set_str(s[0] == '+' ? s.substr(1) : s, 10) == 0;
}

std::string fixed_from_scaled(Integer v, int digits) {
  bool neg = v < 0;
  if (neg) v = -v;
  std::string s = v.get_str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, digits + 1 - s.size(), '0');
  std::string ip = s.substr(0, s.size() - digits);
  std::string fp = s.substr(s.size() - digits);
  while (!fp.empty() && fp.back() == '0') fp.pop_back();
  std::string out = ip;
  if (!fp.empty()) out += "." + fp;
  if (neg && out != "0") out.insert(0, "-");
  return out;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  Integer num, den = 1;
  if (!parse_int(text.substr(0, slash), num)) throw ParseError("bad rational '" + text + "'", 0);
  if (slash != std::string::npos) {
    if (!parse_int(text.substr(slash + 1), den) || den == 0)
      throw ParseError("bad rational '" + text + "'", slash + 1);
  }
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_decimal(const Rational& q, int digits) {
  Rational scaled = q * Rational(ipow(10, digits));
  Integer n = scaled.get_num(), d = scaled.get_den();
  Integer twice = 2 * abs(n) + d;
  Integer r = twice / (2 * d);
  if (n < 0) r = -r;
  return fixed_from_scaled(r, digits);
}

std::string to_decimal_upper(const Rational& q, int digits) {
  Rational scaled = q * Rational(ipow(10, digits));
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  return fixed_from_scaled(r, digits);
}

Integer ipow(long base, unsigned long exp) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base < 0 ? -base : base), exp);
  if (base < 0 && (exp & 1)) r = -r;
  return r;
}

Rational pow(const Rational& base, long exp) {
  if (exp < 0) {
    if (base == 0) throw RangeError("zero to a negative power");
    return pow(Rational(1) / base, -exp);
  }
  Integer n, d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exp));
  mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exp));
  return Rational(n, d);  // already in lowest terms
}

Rational pow3_inv(long n) { return Rational(Integer(1), ipow(3, static_cast<unsigned long>(n))); }

Rational rmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }
Rational rabs(const Rational& a) { return a < 0 ? Rational(-a) : a; }

bool finite_ternary(const Rational& x, std::vector<int>& digits, int max_len) {
  digits.clear();
  if (x < 0 || x >= 1) return false;
  // denominator must be a power of 3
  Integer d = x.get_den();
  int len = 0;
  while (d % 3 == 0) {
    d /= 3;
    ++len;
  }
  if (d != 1 || len > max_len) return false;
  Integer n = x.get_num();
  digits.assign(len, 0);
  for (int i = len - 1; i >= 0; --i) {
    Integer r = n % 3;
    digits[i] = static_cast<int>(r.get_si());
    n /= 3;
  }
  return true;
}

bool is_cantor_left_endpoint(const Rational& x) {
  std::vector<int> ds;
  if (!finite_ternary(x, ds)) return false;
  for (int d : ds)
    if (d == 1) return false;
  return true;
}

int ternary_length(const Rational& x) {
  Integer d = x.get_den();
  int len = 0;
  while (d % 3 == 0) {
    d /= 3;
    ++len;
  }
  return len;
}

void sqrt_bounds(const Rational& q, Rational& lower, Rational& upper, int bits) {
  if (q <= 0) {
    lower = upper = 0;
    return;
  }
  // floor(sqrt(q * 4^bits)) / 2^bits
  Integer scale = ipow(2, static_cast<unsigned long>(2 * bits));
  Rational s = q * Rational(scale);
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  Integer r;
  mpz_sqrt(r.get_mpz_t(), fl.get_mpz_t());
  Integer den = ipow(2, static_cast<unsigned long>(bits));
  lower = Rational(r, den);
  lower.canonicalize();
  upper = Rational(r + 1, den);
  upper.canonicalize();
  if (lower * lower == q) upper = lower;
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace fanforge
